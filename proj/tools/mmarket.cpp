// mmarket: Mallows matching markets from the command line.
//
// Exit codes: 0 success, 1 usage error, 2 invalid config or input,
// 3 runtime failure (failed trials still have their records written).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mmarket/errors.hpp"
#include "mmarket/harness.hpp"
#include "mmarket/mallows.hpp"
#include "mmarket/market.hpp"
#include "mmarket/matching.hpp"
#include "mmarket/rng.hpp"
#include "mmarket/serialization.hpp"

namespace {

using namespace mmarket;

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// Writes to --out when given, stdout otherwise.
void deliver(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw std::runtime_error("write to stdout failed");
  } else {
    write_text_file(out_path, text);
  }
}

Side parse_side(const std::string& s) {
  if (s == "men") return Side::Men;
  if (s == "women") return Side::Women;
  throw ConfigError("side must be 'men' or 'women', got '" + s + "'");
}

struct SampleArgs {
  double phi = 0.5;
  int t = 10;
  int count = 1;
  std::uint64_t seed = 0;
  std::string format = "ranks";
  std::string out;
};

int cmd_sample(const SampleArgs& a) {
  const MallowsParams params{a.phi, a.t};
  params.validate();
  if (a.count < 0) throw ConfigError("--count must be >= 0");
  std::ostringstream os;
  for (int i = 0; i < a.count; ++i) {
    Rng rng(derive_seed(a.seed, static_cast<std::uint64_t>(i)));
    const auto perm = sample(params, rng);
    std::vector<int> row;
    if (a.format == "order") {
      for (int e : perm.order()) row.push_back(e + 1);
    } else {
      row.assign(perm.ranks().begin(), perm.ranks().end());
    }
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? " " : "") << row[j];
    os << '\n';
  }
  deliver(a.out, os.str());
  return 0;
}

struct GenerateArgs {
  MarketConfig config;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  deliver(a.out, instance_to_json(generate(a.config)) + "\n");
  return 0;
}

struct MatchArgs {
  std::string instance;
  std::string proposing = "men";
  std::string out;
};

int cmd_match(const MatchArgs& a) {
  const auto inst = read_instance_file(a.instance);
  DaStats stats;
  const auto mu = deferred_acceptance(inst, parse_side(a.proposing), &stats);
  if (!is_stable(inst, mu)) throw InstabilityError("deferred acceptance produced an unstable matching");
  deliver(a.out, matching_to_json(mu) + "\n");
  std::cerr << "proposals: " << stats.proposals << '\n';
  return 0;
}

struct EnumerateArgs {
  std::string instance;
  std::size_t cap = 1000;
  bool brute_force = false;
  std::string out;
};

int cmd_enumerate(const EnumerateArgs& a) {
  const auto inst = read_instance_file(a.instance);
  const auto set = a.brute_force ? brute_force_stable(inst) : enumerate_stable(inst, a.cap);
  deliver(a.out, stable_set_to_json(set) + "\n");
  if (set.truncated) std::cerr << "warning: stable set truncated at " << a.cap << " matchings\n";
  return 0;
}

struct ExperimentArgs {
  std::string config;
  std::string out;
  std::string format = "csv";
  bool timing = false;
  int workers = 0;
};

int cmd_experiment(const ExperimentArgs& a) {
  const auto config = parse_experiment_config(read_text_file(a.config));
  const auto records = run(config, RunOptions{a.workers});
  std::ostringstream os;
  emit(records, a.format == "json" ? RecordFormat::Json : RecordFormat::Csv, os, a.timing);
  deliver(a.out, os.str());
  std::size_t failed = 0;
  for (const auto& r : records) {
    if (r.error.empty()) continue;
    if (failed++ < 5) std::cerr << "trial failed (cell " << r.cell << ", trial " << r.trial << "): " << r.error << '\n';
  }
  if (failed > 0) {
    std::cerr << failed << " of " << records.size() << " trials failed\n";
    return kExitRuntime;
  }
  return 0;
}

struct ReportArgs {
  std::string records;
  std::string table = "welfare";
  std::string out;
};

int cmd_report(const ReportArgs& a) {
  const auto text = read_text_file(a.records);
  std::vector<TrialRecord> records;
  try {
    records = parse_records(text);
  } catch (const std::runtime_error& e) {
    throw ConfigError(a.records + ": " + e.what());
  }
  std::ostringstream os;
  if (a.table == "convergence") {
    write_convergence_csv(convergence_table(records), os);
  } else {
    write_welfare_csv(welfare_table(records), os);
  }
  deliver(a.out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable matching in Mallows-preference markets"};
  app.require_subcommand(1);

  SampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("sample", "Draw Mallows permutations, one per line");
  sample_cmd->add_option("--phi", sample_args.phi, "Dispersion in [0, 1]")->required();
  sample_cmd->add_option("-t,--size", sample_args.t, "Permutation length")->required();
  sample_cmd->add_option("--count", sample_args.count, "Number of draws")->capture_default_str();
  sample_cmd->add_option("--seed", sample_args.seed, "Seed; draw i uses derive_seed(seed, i)")->capture_default_str();
  sample_cmd->add_option("--format", sample_args.format, "ranks: rank of each element; order: elements best first")
      ->check(CLI::IsMember({"ranks", "order"}))
      ->capture_default_str();
  sample_cmd->add_option("-o,--out", sample_args.out, "Output file (default stdout)");

  GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand("generate", "Write a random market instance as JSON");
  gen_cmd->add_option("-n", gen_args.config.n, "Men")->required();
  gen_cmd->add_option("-k", gen_args.config.k, "Surplus women")->capture_default_str();
  gen_cmd->add_option("--phi-m", gen_args.config.phi_m, "Men's dispersion")->required();
  gen_cmd->add_option("--phi-w", gen_args.config.phi_w, "Women's dispersion")->required();
  gen_cmd->add_option("--seed", gen_args.config.seed, "Market seed")->capture_default_str();
  gen_cmd->add_option("-o,--out", gen_args.out, "Output file (default stdout)");

  MatchArgs match_args;
  auto* match_cmd = app.add_subcommand("match", "Run deferred acceptance on an instance file");
  match_cmd->add_option("instance", match_args.instance, "Instance JSON")->required();
  match_cmd->add_option("--proposing", match_args.proposing, "Proposing side")
      ->check(CLI::IsMember({"men", "women"}))
      ->capture_default_str();
  match_cmd->add_option("-o,--out", match_args.out, "Output file (default stdout)");

  EnumerateArgs enum_args;
  auto* enum_cmd = app.add_subcommand("enumerate", "All stable matchings of an instance file");
  enum_cmd->add_option("instance", enum_args.instance, "Instance JSON")->required();
  enum_cmd->add_option("--cap", enum_args.cap, "Maximum matchings to list (>= 2)")->capture_default_str();
  enum_cmd->add_flag("--brute-force", enum_args.brute_force, "Use exhaustive search (n <= 9)");
  enum_cmd->add_option("-o,--out", enum_args.out, "Output file (default stdout)");

  ExperimentArgs exp_args;
  auto* exp_cmd = app.add_subcommand("experiment", "Run an experiment config, one record per trial");
  exp_cmd->add_option("-c,--config", exp_args.config, "ExperimentConfig JSON")->required();
  exp_cmd->add_option("-o,--out", exp_args.out, "Output file (default stdout)");
  exp_cmd->add_option("--format", exp_args.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  exp_cmd->add_flag("--timing", exp_args.timing, "Append per-trial wall time (output no longer reproducible)");
  exp_cmd->add_option("--workers", exp_args.workers, "Worker threads (default MMARKET_WORKERS or all cores)")
      ->check(CLI::NonNegativeNumber);

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Summarize a records file");
  report_cmd->add_option("-r,--records", report_args.records, "Records (CSV or JSON lines)")->required();
  report_cmd->add_option("--table", report_args.table)
      ->check(CLI::IsMember({"convergence", "welfare"}))
      ->capture_default_str();
  report_cmd->add_option("-o,--out", report_args.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sample_cmd) return cmd_sample(sample_args);
    if (*gen_cmd) return cmd_generate(gen_args);
    if (*match_cmd) return cmd_match(match_args);
    if (*enum_cmd) return cmd_enumerate(enum_args);
    if (*exp_cmd) return cmd_experiment(exp_args);
    if (*report_cmd) return cmd_report(report_args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
