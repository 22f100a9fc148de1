#include "mmarket/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <thread>

#include <json.hpp>

#include "mmarket/errors.hpp"
#include "mmarket/market.hpp"
#include "mmarket/matching.hpp"
#include "mmarket/metrics.hpp"
#include "mmarket/rng.hpp"

namespace mmarket {
namespace {

using nlohmann::json;

void check_phi(double phi, const char* name) {
  if (!(phi >= 0.0 && phi <= 1.0)) {
    throw ConfigError(std::string(name) + " values must lie in [0, 1], got " + std::to_string(phi));
  }
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Linear interpolation between order statistics (Hyndman-Fan type 7).
double quantile_of(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::map<std::size_t, std::vector<const TrialRecord*>> group_by_cell(
    const std::vector<TrialRecord>& records) {
  std::map<std::size_t, std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) {
    if (r.error.empty()) groups[r.cell].push_back(&r);
  }
  return groups;
}

Cell cell_of(const TrialRecord& r) { return Cell{r.cell, r.n, r.k, r.phi_m, r.phi_w}; }

StableSet extremes(const MarketInstance& instance) {
  StableSet set;
  set.matchings.push_back(deferred_acceptance(instance, Side::Men));
  auto woman_optimal = deferred_acceptance(instance, Side::Women);
  if (woman_optimal != set.matchings.front()) set.matchings.push_back(std::move(woman_optimal));
  set.man_optimal = 0;
  set.woman_optimal = set.matchings.size() - 1;
  return set;
}

}  // namespace

const char* to_string(EnumerationMode mode) {
  switch (mode) {
    case EnumerationMode::ExtremesOnly: return "extremes_only";
    case EnumerationMode::Enumerate: return "enumerate";
    case EnumerationMode::BruteForce: return "brute_force";
  }
  return "?";
}

EnumerationMode parse_mode(std::string_view text) {
  if (text == "extremes_only") return EnumerationMode::ExtremesOnly;
  if (text == "enumerate") return EnumerationMode::Enumerate;
  if (text == "brute_force") return EnumerationMode::BruteForce;
  throw ConfigError("unknown mode '" + std::string(text) +
                    "' (expected extremes_only, enumerate or brute_force)");
}

double ThresholdSpec::coefficient(double phi) const {
  if (!(phi >= 0.0 && phi < 1.0)) {
    throw ConfigError("localization thresholds need 0 <= phi < 1, got " + std::to_string(phi));
  }
  if (phi == 0.0) return 0.0;
  return c_margin * (draws_exponent() + 1.0) / -std::log(phi);
}

double ThresholdSpec::threshold(double phi, int t) const {
  return coefficient(phi) * std::log(static_cast<double>(t));
}

void ThresholdSpec::validate() const {
  if (!(z >= 0.0) || !std::isfinite(z)) throw ConfigError("threshold.z must be a finite value >= 0");
  if (!(c_margin > 1.0) || !std::isfinite(c_margin)) {
    throw ConfigError("threshold.c_margin must be a finite value > 1");
  }
}

void ExperimentConfig::validate() const {
  if (n.empty()) throw ConfigError("sweep needs at least one n");
  if (k.empty()) throw ConfigError("sweep needs at least one k");
  const bool paired = !phi.empty();
  if (paired && (!phi_m.empty() || !phi_w.empty())) {
    throw ConfigError("give either phi or phi_m/phi_w, not both");
  }
  if (!paired && (phi_m.empty() || phi_w.empty())) {
    throw ConfigError("sweep needs phi, or both phi_m and phi_w");
  }
  for (double p : phi) check_phi(p, "phi");
  for (double p : phi_m) check_phi(p, "phi_m");
  for (double p : phi_w) check_phi(p, "phi_w");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (enumeration_cap < 2) throw ConfigError("enumeration_cap must be >= 2");
  threshold.validate();
  for (int nn : n) {
    if (nn < 1) throw ConfigError("n must be >= 1, got " + std::to_string(nn));
    if (nn + static_cast<long long>(*std::max_element(k.begin(), k.end())) > kDefaultMaxAgentsPerSide) {
      throw ConfigError("n + k exceeds " + std::to_string(kDefaultMaxAgentsPerSide));
    }
    for (int kk : k) {
      if (kk < 0) throw ConfigError("k must be >= 0, got " + std::to_string(kk));
      if (static_cast<double>(kk) > std::pow(static_cast<double>(nn), threshold.z)) {
        throw ConfigError("k = " + std::to_string(kk) + " exceeds n^z for n = " + std::to_string(nn) +
                          ", z = " + std::to_string(threshold.z));
      }
      if (mode == EnumerationMode::BruteForce &&
          (nn > kBruteForceMaxMen || nn + kk > kBruteForceMaxWomen)) {
        throw ConfigError("brute_force mode needs n <= 9 and n + k <= 10");
      }
    }
  }
}

std::vector<Cell> ExperimentConfig::cells() const {
  std::vector<std::pair<double, double>> phis;
  if (!phi.empty()) {
    for (double p : phi) phis.emplace_back(p, p);
  } else {
    for (double pm : phi_m)
      for (double pw : phi_w) phis.emplace_back(pm, pw);
  }
  std::vector<Cell> out;
  for (int nn : n)
    for (int kk : k)
      for (const auto& [pm, pw] : phis) out.push_back(Cell{out.size(), nn, kk, pm, pw});
  return out;
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const char* const kKnown[] = {"n", "k", "phi", "phi_m", "phi_w", "trials", "master_seed",
                                       "threshold", "enumeration_cap", "mode"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  ExperimentConfig c;
  try {
    c.n = j.at("n").get<std::vector<int>>();
    if (j.contains("k")) c.k = j["k"].get<std::vector<int>>();
    if (j.contains("phi")) c.phi = j["phi"].get<std::vector<double>>();
    if (j.contains("phi_m")) c.phi_m = j["phi_m"].get<std::vector<double>>();
    if (j.contains("phi_w")) c.phi_w = j["phi_w"].get<std::vector<double>>();
    if (j.contains("trials")) c.trials = j["trials"].get<int>();
    if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("enumeration_cap")) c.enumeration_cap = j["enumeration_cap"].get<std::size_t>();
    if (j.contains("mode")) c.mode = parse_mode(j["mode"].get<std::string>());
    if (j.contains("threshold")) {
      const auto& t = j["threshold"];
      if (!t.is_object()) throw ConfigError("threshold must be an object");
      for (const auto& [key, value] : t.items()) {
        if (key != "z" && key != "c_margin") throw ConfigError("unknown threshold field '" + key + "'");
      }
      c.threshold.z = t.value("z", c.threshold.z);
      c.threshold.c_margin = t.value("c_margin", c.threshold.c_margin);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string experiment_config_to_json(const ExperimentConfig& c) {
  json j{{"n", c.n},
         {"k", c.k},
         {"trials", c.trials},
         {"master_seed", c.master_seed},
         {"threshold", {{"z", c.threshold.z}, {"c_margin", c.threshold.c_margin}}},
         {"enumeration_cap", c.enumeration_cap},
         {"mode", to_string(c.mode)}};
  if (!c.phi.empty()) {
    j["phi"] = c.phi;
  } else {
    j["phi_m"] = c.phi_m;
    j["phi_w"] = c.phi_w;
  }
  return j.dump(2);
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t cell, int trial) {
  return derive_seed(derive_seed(master_seed, cell), static_cast<std::uint64_t>(trial));
}

TrialRecord run_trial(const ExperimentConfig& config, const Cell& cell, int trial) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.cell = cell.index;
  rec.trial = trial;
  rec.n = cell.n;
  rec.k = cell.k;
  rec.phi_m = cell.phi_m;
  rec.phi_w = cell.phi_w;
  rec.seed = trial_seed(config.master_seed, cell.index, trial);

  try {
    const MarketInstance instance = generate({cell.n, cell.k, cell.phi_m, cell.phi_w, rec.seed});

    const auto disp = market_displacement(instance);
    rec.delta_rm = disp.delta_rm;
    rec.delta_rw = disp.delta_rw;
    rec.max_disp_men = max_central_displacement(instance.men);
    rec.max_disp_women = max_central_displacement(instance.women);
    if (cell.phi_m < 1.0 && cell.phi_w < 1.0) {
      rec.threshold_men = config.threshold.threshold(cell.phi_m, instance.num_women());
      rec.threshold_women = config.threshold.threshold(cell.phi_w, instance.num_men());
      // Zero displacement is localized under any threshold.
      const auto localized = [](int disp_max, double d) { return disp_max == 0 || disp_max < d; };
      rec.localization_event = localized(rec.max_disp_men, *rec.threshold_men) &&
                               localized(rec.max_disp_women, *rec.threshold_women);
    }

    StableSet set;
    switch (config.mode) {
      case EnumerationMode::ExtremesOnly: set = extremes(instance); break;
      case EnumerationMode::Enumerate: set = enumerate_stable(instance, config.enumeration_cap); break;
      case EnumerationMode::BruteForce: set = brute_force_stable(instance); break;
    }
    if (config.mode != EnumerationMode::ExtremesOnly) {
      rec.stable_count = static_cast<std::int64_t>(set.matchings.size());
    }
    rec.truncated = set.truncated;

    for (const auto& mu : set.matchings) {
      const auto gaps = pair_gaps(instance, mu);
      rec.max_mutual_gap = std::max(rec.max_mutual_gap, gaps.max_mutual_gap);
      rec.max_central_gap = std::max(rec.max_central_gap, gaps.max_central_gap);
      if (gaps.max_quantile_gap) {
        rec.max_quantile_gap = std::max(rec.max_quantile_gap.value_or(0.0), *gaps.max_quantile_gap);
      }
      const auto holzman = holzman_check(instance, mu);
      rec.holzman_bound = holzman.bound;
      rec.holzman_ok = rec.holzman_ok && holzman.holds;
    }

    const auto at_m = average_ranks(instance, set.matchings[set.man_optimal]);
    const auto at_w = average_ranks(instance, set.matchings[set.woman_optimal]);
    rec.am_mu_m = at_m.a_m;
    rec.aw_mu_m = at_m.a_w;
    rec.am_mu_w = at_w.a_m;
    rec.aw_mu_w = at_w.a_w;
    const auto ratios = welfare_ratios(instance, set);
    rec.ratio_men = ratios.men_pessimal_over_optimal;
    rec.ratio_women = ratios.women_pessimal_over_optimal;
    rec.max_aw_over_am = ratios.max_women_over_men;
    rec.max_am_over_aw = ratios.max_men_over_women;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }

  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

int worker_count_from_env() {
  if (const char* env = std::getenv("MMARKET_WORKERS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != nullptr && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<TrialRecord> run(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto cells = config.cells();
  const auto trials = static_cast<std::size_t>(config.trials);
  const std::size_t total = cells.size() * trials;
  std::vector<TrialRecord> records(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      records[task] = run_trial(config, cells[task / trials], static_cast<int>(task % trials));
    }
  };

  const int workers = std::max(1, std::min<int>(options.workers > 0 ? options.workers : worker_count_from_env(),
                                                static_cast<int>(std::max<std::size_t>(total, 1))));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  return records;
}

double localization_rate(const std::vector<TrialRecord>& records, std::size_t cell) {
  std::size_t count = 0;
  std::size_t hits = 0;
  for (const auto& r : records) {
    if (r.cell != cell || !r.error.empty()) continue;
    if (r.phi_m >= 1.0 || r.phi_w >= 1.0) {
      throw ConfigError("localization is undefined for phi = 1 (cell " + std::to_string(cell) + ")");
    }
    ++count;
    if (r.localization_event.value_or(false)) ++hits;
  }
  if (count == 0) throw ConfigError("no records for cell " + std::to_string(cell));
  return static_cast<double>(hits) / static_cast<double>(count);
}

std::vector<ConvergenceRow> convergence_table(const std::vector<TrialRecord>& records) {
  std::vector<ConvergenceRow> rows;
  for (const auto& [cell, group] : group_by_cell(records)) {
    const auto& first = *group.front();
    if (first.k != 0) {
      throw ConfigError("convergence table needs balanced cells; cell " + std::to_string(cell) +
                        " has k = " + std::to_string(first.k));
    }
    std::vector<double> quantile_gaps;
    std::vector<double> central_over_log;
    const double log_n = std::log(static_cast<double>(first.n));
    for (const auto* r : group) {
      quantile_gaps.push_back(r->max_quantile_gap.value_or(0.0));
      central_over_log.push_back(log_n > 0.0 ? r->max_central_gap / log_n : 0.0);
    }
    ConvergenceRow row;
    row.cell = cell_of(first);
    row.trials = static_cast<int>(group.size());
    row.median_max_quantile_gap = median_of(quantile_gaps);
    row.p90_max_quantile_gap = quantile_of(quantile_gaps, 0.9);
    row.median_central_gap_over_log_n = median_of(central_over_log);
    row.max_central_gap_over_log_n = *std::max_element(central_over_log.begin(), central_over_log.end());
    rows.push_back(row);
  }
  return rows;
}

std::vector<WelfareRow> welfare_table(const std::vector<TrialRecord>& records) {
  std::vector<WelfareRow> rows;
  for (const auto& [cell, group] : group_by_cell(records)) {
    const auto& first = *group.front();
    WelfareRow row;
    row.cell = cell_of(first);
    row.trials = static_cast<int>(group.size());
    const double count = static_cast<double>(group.size());
    for (const auto* r : group) {
      row.mean_am_mu_m += r->am_mu_m;
      row.mean_am_mu_w += r->am_mu_w;
      row.mean_aw_mu_m += r->aw_mu_m;
      row.mean_aw_mu_w += r->aw_mu_w;
      row.mean_ratio_men += r->ratio_men;
      row.mean_ratio_women += r->ratio_women;
      row.mean_aw_over_am_mu_m += r->aw_mu_m / r->am_mu_m;
      row.mean_aw_over_am_mu_w += r->aw_mu_w / r->am_mu_w;
      row.mean_max_aw_over_am += r->max_aw_over_am;
      row.mean_max_am_over_aw += r->max_am_over_aw;
    }
    for (double* m : {&row.mean_am_mu_m, &row.mean_am_mu_w, &row.mean_aw_mu_m, &row.mean_aw_mu_w,
                      &row.mean_ratio_men, &row.mean_ratio_women, &row.mean_aw_over_am_mu_m,
                      &row.mean_aw_over_am_mu_w, &row.mean_max_aw_over_am, &row.mean_max_am_over_aw}) {
      *m /= count;
    }
    if (first.phi_m == 1.0 && first.phi_w == 1.0 && first.n > 1) {
      const double log_n = std::log(static_cast<double>(first.n));
      row.log_n = log_n;
      row.n_over_log_n = static_cast<double>(first.n) / log_n;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mmarket
