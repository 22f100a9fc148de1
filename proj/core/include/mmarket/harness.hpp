#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmarket {

enum class EnumerationMode { ExtremesOnly, Enumerate, BruteForce };

const char* to_string(EnumerationMode mode);
EnumerationMode parse_mode(std::string_view text);

// Displacement thresholds for the localization event.
//
// z bounds the market imbalance, k <= n^z. Each side draws s rankings of
// length t with s <= t^max(1, z) (men: n draws over n + k women; women: n + k
// draws over n men), so the per-side coefficient is
//   c = c_margin * (max(1, z) + 1) / (-ln phi)
// and the threshold is d(t) = c ln t (natural log).
struct ThresholdSpec {
  double z = 1.0;
  double c_margin = 1.5;

  double draws_exponent() const { return z > 1.0 ? z : 1.0; }
  // Throws ConfigError for phi outside [0, 1); phi = 0 gives c = 0.
  double coefficient(double phi) const;
  double threshold(double phi, int t) const;
  void validate() const;
};

struct Cell {
  std::size_t index = 0;
  int n = 1;
  int k = 0;
  double phi_m = 1.0;
  double phi_w = 1.0;
};

// A sweep of market cells, each run for `trials` independent markets.
//
// Cells are the Cartesian product n x k x (phi pairs) in that nesting order.
// Phi pairs come either from `phi` (same coefficient on both sides) or from
// the product phi_m x phi_w.
struct ExperimentConfig {
  std::vector<int> n;
  std::vector<int> k{0};
  std::vector<double> phi;
  std::vector<double> phi_m;
  std::vector<double> phi_w;
  int trials = 1;
  std::uint64_t master_seed = 0;
  ThresholdSpec threshold;
  std::size_t enumeration_cap = 1000;
  EnumerationMode mode = EnumerationMode::ExtremesOnly;

  // Throws ConfigError on any violated constraint (empty sweeps, trials < 1,
  // k > n^z, brute force beyond n = 9 / n + k = 10, phi outside [0, 1], ...).
  void validate() const;
  std::vector<Cell> cells() const;
};

// Parses the JSON config file format; unknown fields are rejected with
// ConfigError. Example:
//   {"n": [200, 800], "k": [0], "phi": [0.9], "trials": 50, "master_seed": 1,
//    "threshold": {"z": 1, "c_margin": 1.5}, "enumeration_cap": 1000,
//    "mode": "extremes_only"}
ExperimentConfig parse_experiment_config(std::string_view json_text);
std::string experiment_config_to_json(const ExperimentConfig& config);

// Seed of one trial's market: derive_seed(derive_seed(master, cell), trial).
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t cell, int trial);

// Statistics of one simulated market. Matching statistics are maxima over the
// evaluated stable matchings (both extremes, or the enumerated set).
struct TrialRecord {
  std::size_t cell = 0;
  int trial = 0;
  int n = 0;
  int k = 0;
  double phi_m = 0.0;
  double phi_w = 0.0;
  std::uint64_t seed = 0;

  int delta_rm = 0;
  int delta_rw = 0;
  int max_disp_men = 0;    // max |rank - central rank| over men's rankings
  int max_disp_women = 0;  // same over women's rankings
  std::optional<double> threshold_men;
  std::optional<double> threshold_women;
  std::optional<bool> localization_event;  // unset when either phi is 1

  int max_mutual_gap = 0;
  int max_central_gap = 0;
  std::optional<double> max_quantile_gap;  // balanced cells only

  double am_mu_m = 0.0;  // A_M(mu_M)
  double am_mu_w = 0.0;  // A_M(mu_W)
  double aw_mu_m = 0.0;  // A_W(mu_M)
  double aw_mu_w = 0.0;  // A_W(mu_W)
  double ratio_men = 0.0;    // A_M(mu_W) / A_M(mu_M)
  double ratio_women = 0.0;  // A_W(mu_M) / A_W(mu_W)
  double max_aw_over_am = 0.0;
  double max_am_over_aw = 0.0;

  int holzman_bound = 0;
  bool holzman_ok = true;
  std::optional<std::int64_t> stable_count;  // enumerate / brute_force modes
  bool truncated = false;
  std::string error;  // empty on success

  double wall_seconds = 0.0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

TrialRecord run_trial(const ExperimentConfig& config, const Cell& cell, int trial);

struct RunOptions {
  int workers = 0;  // 0: worker_count_from_env()
};

// Worker count from MMARKET_WORKERS, defaulting to the hardware concurrency.
int worker_count_from_env();

// Every (cell, trial) of the sweep, ordered by cell then trial. The result is
// a pure function of the config; workers only change wall time.
std::vector<TrialRecord> run(const ExperimentConfig& config, const RunOptions& options = {});

// Fraction of the cell's trials whose localization event holds. Throws
// ConfigError for an empty cell or a cell with phi = 1 on either side.
double localization_rate(const std::vector<TrialRecord>& records, std::size_t cell);

struct ConvergenceRow {
  Cell cell;
  int trials = 0;
  double median_max_quantile_gap = 0.0;
  double p90_max_quantile_gap = 0.0;
  double median_central_gap_over_log_n = 0.0;
  double max_central_gap_over_log_n = 0.0;
};

// Per balanced cell; throws ConfigError if any cell has k > 0.
std::vector<ConvergenceRow> convergence_table(const std::vector<TrialRecord>& records);

struct WelfareRow {
  Cell cell;
  int trials = 0;
  double mean_am_mu_m = 0.0;
  double mean_am_mu_w = 0.0;
  double mean_aw_mu_m = 0.0;
  double mean_aw_mu_w = 0.0;
  double mean_ratio_men = 0.0;
  double mean_ratio_women = 0.0;
  double mean_aw_over_am_mu_m = 0.0;  // A_W / A_M at the man-optimal matching
  double mean_aw_over_am_mu_w = 0.0;  // A_W / A_M at the woman-optimal matching
  double mean_max_aw_over_am = 0.0;
  double mean_max_am_over_aw = 0.0;
  // Uniform-preference reference curves, filled when phi_m = phi_w = 1.
  std::optional<double> log_n;
  std::optional<double> n_over_log_n;
};

std::vector<WelfareRow> welfare_table(const std::vector<TrialRecord>& records);

// Records as CSV (header first, fixed column order) or one JSON object per
// line. Doubles are written with 17 significant digits; wall time is appended
// only when include_timing is set, so default output is reproducible.
enum class RecordFormat { Csv, Json };
void emit(const std::vector<TrialRecord>& records, RecordFormat format, std::ostream& out,
          bool include_timing = false);
std::vector<std::string> csv_columns(bool include_timing = false);

// Reads either format back (JSON lines if the first non-blank character is
// '{', CSV otherwise). Throws std::runtime_error on malformed input.
std::vector<TrialRecord> parse_records(std::string_view text);

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out);
void write_welfare_csv(const std::vector<WelfareRow>& rows, std::ostream& out);

}  // namespace mmarket
