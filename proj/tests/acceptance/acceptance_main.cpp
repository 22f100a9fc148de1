// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mmarket/harness.hpp"
#include "mmarket/mallows.hpp"
#include "mmarket/market.hpp"
#include "mmarket/matching.hpp"
#include "mmarket/metrics.hpp"
#include "mmarket/rng.hpp"
#include "support/oracles.hpp"

namespace {

using namespace mmarket;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Exact pmf table and sampler total-variation distance.
Outcome mallows_exactness() {
  Outcome out;
  const MallowsParams p3{0.5, 3};
  double worst_table = 0.0;
  const std::map<std::int64_t, double> table{{0, 8.0 / 21}, {1, 4.0 / 21}, {2, 2.0 / 21}, {3, 1.0 / 21}};
  std::map<std::int64_t, int> multiplicity;
  for (const auto& ranks : oracle::all_rank_vectors(3)) {
    const Permutation perm(ranks);
    const auto inv = oracle::naive_inversions(ranks);
    ++multiplicity[inv];
    worst_table = std::max(worst_table, std::abs(pmf(perm, p3) - table.at(inv)));
  }
  const bool shape = multiplicity == std::map<std::int64_t, int>{{0, 1}, {1, 2}, {2, 2}, {3, 1}};
  const bool z_ok = std::abs(normalization_constant(p3) - 21.0 / 8.0) <= 1e-12;
  if (worst_table > 1e-12 || !shape || !z_ok) out.pass = false;

  constexpr int kSamples = 1'000'000;
  double worst_tv = 0.0;
  std::string where;
  for (double phi : {0.1, 0.5, 0.9, 1.0}) {
    for (int t = 1; t <= 5; ++t) {
      const MallowsParams params{phi, t};
      Rng rng(derive_seed(0xACCE5501, static_cast<std::uint64_t>(t * 100 + phi * 10)));
      std::map<std::vector<int>, int> counts;
      for (int s = 0; s < kSamples; ++s) {
        const auto perm = sample(params, rng);
        ++counts[std::vector<int>(perm.ranks().begin(), perm.ranks().end())];
      }
      double tv = 0.0;
      for (const auto& ranks : oracle::all_rank_vectors(t)) {
        const auto it = counts.find(ranks);
        const double emp = it == counts.end() ? 0.0 : static_cast<double>(it->second) / kSamples;
        tv += std::abs(emp - pmf(Permutation(ranks), params));
      }
      tv /= 2;
      if (tv > worst_tv) {
        worst_tv = tv;
        where = "phi=" + fmt("%g", phi) + " t=" + std::to_string(t);
      }
    }
  }
  if (!(worst_tv < 0.01)) out.pass = false;
  out.detail = "table max err " + fmt("%.3g", worst_table) + ", max TV " + fmt("%.5f", worst_tv) + " at " + where;
  return out;
}

// P(|pi(i) - i| >= d) <= 2 phi^d + 3 SE for every element and d <= 50.
Outcome tail_bound_check() {
  Outcome out;
  constexpr int kN = 1000;
  constexpr int kSamples = 10'000;
  constexpr int kMaxD = 50;
  int violations = 0;
  double worst_excess = -1.0;
  for (double phi : {0.5, 0.9}) {
    const MallowsParams params{phi, kN};
    Rng rng(derive_seed(0xACCE5502, static_cast<std::uint64_t>(phi * 10)));
    // hist[i][d] = #samples with displacement of element i exactly d (d capped at kMaxD).
    std::vector<std::array<int, kMaxD + 1>> hist(kN);
    for (auto& h : hist) h.fill(0);
    for (int s = 0; s < kSamples; ++s) {
      const auto perm = sample(params, rng);
      for (int i = 0; i < kN; ++i) {
        const int disp = std::min(kMaxD, std::abs(perm.rank(i) - (i + 1)));
        ++hist[static_cast<std::size_t>(i)][static_cast<std::size_t>(disp)];
      }
    }
    for (int i = 0; i < kN; ++i) {
      int tail = 0;
      for (int d = kMaxD; d >= 1; --d) {
        tail += hist[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
        const double emp = static_cast<double>(tail) / kSamples;
        // Standard error of the empirical frequency.
        const double se = std::sqrt(emp * (1.0 - emp) / kSamples);
        const double excess = emp - (tail_bound(d, phi) + 3 * se);
        worst_excess = std::max(worst_excess, excess);
        if (excess > 0) ++violations;
      }
    }
  }
  out.pass = violations == 0;
  out.detail = std::to_string(violations) + " violations over 2 x 1000 x 50 checks, max (emp - limit) " +
               fmt("%.4g", worst_excess);
  return out;
}

// Localization rate at z = 0, c_margin = 1.5, phi = 0.5.
Outcome localization_trend() {
  Outcome out;
  ExperimentConfig c;
  c.n = {100, 1000};
  c.k = {0};
  c.phi = {0.5};
  c.trials = 200;
  c.master_seed = 0xACCE5503;
  c.threshold = {0.0, 1.5};
  const auto records = run(c);
  int errors = 0;
  for (const auto& r : records) errors += !r.error.empty();
  const double r100 = localization_rate(records, 0);
  const double r1000 = localization_rate(records, 1);
  out.pass = errors == 0 && r1000 >= r100 && r1000 >= 0.95;
  out.detail = "rate(n=100) " + fmt("%.3f", r100) + ", rate(n=1000) " + fmt("%.3f", r1000);
  return out;
}

// Mutual-gap bound over every brute-forced stable matching of 10^4 instances.
Outcome holzman_bound() {
  Outcome out;
  const double phis[] = {0.0, 0.5, 0.9, 1.0};
  std::int64_t matchings = 0;
  int violations = 0;
  int max_gap = 0;
  for (int i = 0; i < 10'000; ++i) {
    const double pm = phis[i % 4];
    const double pw = phis[(i / 4) % 4];
    const int k = (i / 16) % 3;
    const int n = 1 + (i / 48) % 8;
    const auto inst = generate({n, k, pm, pw, derive_seed(0xACCE5504, static_cast<std::uint64_t>(i))});
    const auto disp = maximal_displacement(inst.men).delta;
    const auto disp_w = maximal_displacement(inst.women).delta;
    const int bound = 2 * std::max(disp, disp_w);
    for (const auto& mu : brute_force_stable(inst).matchings) {
      ++matchings;
      for (int m = 0; m < n; ++m) {
        const int w = mu.man_to_woman[static_cast<std::size_t>(m)];
        const int gap = std::abs(inst.men.rank_of(m, w) - inst.women.rank_of(w, m));
        max_gap = std::max(max_gap, gap);
        if (gap > bound) ++violations;
      }
      if (!holzman_check(inst, mu).holds) ++violations;
    }
  }
  out.pass = violations == 0;
  out.detail = std::to_string(violations) + " violations across " + std::to_string(matchings) +
               " stable matchings (max gap " + std::to_string(max_gap) + ")";
  return out;
}

// Rotation enumeration equals the brute-force stable set.
Outcome enumeration_correctness() {
  Outcome out;
  const double phis[] = {0.5, 0.9, 1.0};
  int mismatches = 0;
  std::int64_t total = 0;
  std::size_t largest = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + i % 8;
    const int k = (i / 8) % 3;
    const double phi = phis[(i / 24) % 3];
    const auto inst = generate({n, k, phi, phi, derive_seed(0xACCE5505, static_cast<std::uint64_t>(i))});
    const auto rot = enumerate_stable(inst, 1'000'000);
    const auto brute = brute_force_stable(inst);
    total += static_cast<std::int64_t>(brute.matchings.size());
    largest = std::max(largest, brute.matchings.size());
    if (rot.truncated || oracle::sorted_men_views(rot) != oracle::sorted_men_views(brute)) ++mismatches;
  }
  out.pass = mismatches == 0;
  out.detail = std::to_string(mismatches) + " mismatches over 1000 instances (" + std::to_string(total) +
               " stable matchings, largest set " + std::to_string(largest) + ")";
  return out;
}

// Median max quantile gap decreasing in n; central gap / ln n bounded.
Outcome quantile_convergence() {
  Outcome out;
  ExperimentConfig c;
  c.n = {200, 800, 3200};
  c.phi = {0.9};
  c.trials = 50;
  c.master_seed = 0xACCE5506;
  const auto records = run(c);
  int errors = 0;
  for (const auto& r : records) errors += !r.error.empty();
  const auto table = convergence_table(records);
  // Chain bound on a localized market: central gap <= d + 2 max(Delta) + d <= 6 d
  // with d = c ln n.
  const double constant = 6.0 * c.threshold.coefficient(0.9);
  bool decreasing = true;
  double worst_ratio = 0.0;
  std::string medians;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (i > 0 && !(table[i].median_max_quantile_gap < table[i - 1].median_max_quantile_gap)) decreasing = false;
    worst_ratio = std::max(worst_ratio, table[i].max_central_gap_over_log_n);
    medians += (i ? ", " : "") + fmt("%.4f", table[i].median_max_quantile_gap);
  }
  const double last = table.empty() ? 1.0 : table.back().median_max_quantile_gap;
  out.pass = errors == 0 && table.size() == 3 && decreasing && last < 0.05 && worst_ratio < constant;
  out.detail = "medians [" + medians + "], max central gap / ln n " + fmt("%.3f", worst_ratio) + " < " +
               fmt("%.1f", constant);
  return out;
}

// Welfare ratio near 1 under Mallows 0.9, large under uniform preferences.
Outcome welfare_equivalence() {
  Outcome out;
  ExperimentConfig c;
  c.n = {2000};
  c.phi = {0.9, 1.0};
  c.trials = 20;
  c.master_seed = 0xACCE5507;
  const auto records = run(c);
  int errors = 0;
  for (const auto& r : records) errors += !r.error.empty();
  const auto table = welfare_table(records);
  if (table.size() != 2) return {false, "unexpected table shape"};
  const double mallows = table[0].mean_ratio_men;
  const double uniform = table[1].mean_ratio_men;
  out.pass = errors == 0 && mallows <= 1.1 && uniform >= 5.0;
  out.detail = "mean A_M(mu_W)/A_M(mu_M): phi=0.9 " + fmt("%.4f", mallows) + ", phi=1 " + fmt("%.2f", uniform) +
               " (n/ln^2 n = " + fmt("%.1f", 2000 / std::pow(std::log(2000.0), 2)) + ")";
  return out;
}

// A_W / A_M at both extremes with one surplus woman.
Outcome short_side_neutrality() {
  Outcome out;
  ExperimentConfig c;
  c.n = {2000};
  c.k = {1};
  c.phi = {0.9, 1.0};
  c.trials = 20;
  c.master_seed = 0xACCE5508;
  const auto records = run(c);
  int errors = 0;
  double lo = 1e300;
  double hi = 0.0;
  for (const auto& r : records) {
    errors += !r.error.empty();
    if (r.cell != 0) continue;
    for (double v : {r.aw_mu_m / r.am_mu_m, r.aw_mu_w / r.am_mu_w}) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const auto table = welfare_table(records);
  if (table.size() != 2) return {false, "unexpected table shape"};
  const auto& m = table[0];
  const auto& u = table[1];
  const bool mallows_ok = m.mean_aw_over_am_mu_m >= 0.8 && m.mean_aw_over_am_mu_m <= 1.25 &&
                          m.mean_aw_over_am_mu_w >= 0.8 && m.mean_aw_over_am_mu_w <= 1.25 && lo >= 0.8 &&
                          hi <= 1.25;
  const bool uniform_ok = u.mean_aw_over_am_mu_m >= 5.0 && u.mean_aw_over_am_mu_w >= 5.0;
  out.pass = errors == 0 && mallows_ok && uniform_ok;
  out.detail = "phi=0.9 A_W/A_M means " + fmt("%.4f", m.mean_aw_over_am_mu_m) + " / " +
               fmt("%.4f", m.mean_aw_over_am_mu_w) + " (per-trial range [" + fmt("%.4f", lo) + ", " +
               fmt("%.4f", hi) + "]), phi=1 means " + fmt("%.2f", u.mean_aw_over_am_mu_m) + " / " +
               fmt("%.2f", u.mean_aw_over_am_mu_w);
  return out;
}

// Unanimous preferences: a single, perfectly assortative stable matching.
Outcome unanimity_collapse() {
  Outcome out;
  std::string failures;
  for (int n : {1, 2, 17, 500, 10'000}) {
    for (int k : {0, 5}) {
      const auto inst = generate({n, k, 0.0, 0.0, derive_seed(0xACCE5509, static_cast<std::uint64_t>(n + k))});
      const auto set = enumerate_stable(inst, 16);
      bool ok = set.matchings.size() == 1 && !set.truncated;
      if (ok) {
        const auto& mu = set.matchings[0];
        for (int m = 0; m < n && ok; ++m) ok = mu.man_to_woman[static_cast<std::size_t>(m)] == m;
        const auto gaps = pair_gaps(inst, mu);
        ok = ok && gaps.max_mutual_gap == 0 && gaps.max_central_gap == 0 &&
             (k > 0 || gaps.max_quantile_gap == 0.0);
        const auto r = welfare_ratios(inst, set);
        ok = ok && r.men_pessimal_over_optimal == 1.0 && r.women_pessimal_over_optimal == 1.0 &&
             r.max_women_over_men == 1.0 && r.max_men_over_women == 1.0;
        const auto w = average_ranks(inst, mu);
        ok = ok && w.a_m == (n + 1) / 2.0 && w.a_w == (n + 1) / 2.0;
        ok = ok && holzman_check(inst, mu).max_mutual_gap == 0;
      }
      if (!ok) failures += " n=" + std::to_string(n) + ",k=" + std::to_string(k);
    }
  }
  out.pass = failures.empty();
  out.detail = failures.empty() ? "n in {1, 2, 17, 500, 10000} x k in {0, 5}" : "failed:" + failures;
  return out;
}

// Same config, different worker counts: byte-identical CSV and JSON.
Outcome determinism() {
  Outcome out;
  ExperimentConfig c;
  c.n = {6, 40, 150};
  c.k = {0, 2};
  c.phi_m = {0.0, 0.7, 1.0};
  c.phi_w = {0.5, 1.0};
  c.trials = 4;
  c.master_seed = 0xACCE5510;
  c.mode = EnumerationMode::Enumerate;
  c.enumeration_cap = 200;
  auto render = [&](int workers) {
    const auto records = run(c, RunOptions{workers});
    std::ostringstream csv;
    std::ostringstream json;
    emit(records, RecordFormat::Csv, csv);
    emit(records, RecordFormat::Json, json);
    return std::pair{csv.str(), json.str()};
  };
  const auto a = render(1);
  const auto b = render(1);
  const auto d = render(4);
  const auto e = render(7);
  out.pass = a == b && a == d && a == e && !a.first.empty();
  out.detail = std::to_string(a.first.size()) + " CSV bytes, " + std::to_string(a.second.size()) +
               " JSON bytes, workers 1/1/4/7";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by number.
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"mallows exactness", mallows_exactness},
      {"displacement tail bound", tail_bound_check},
      {"localization trend", localization_trend},
      {"mutual gap bound", holzman_bound},
      {"enumeration correctness", enumeration_correctness},
      {"quantile-gap convergence", quantile_convergence},
      {"welfare equivalence vs uniform", welfare_equivalence},
      {"short-side neutrality", short_side_neutrality},
      {"unanimity collapse", unanimity_collapse},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.contains(i + 1)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
