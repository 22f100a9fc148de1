#pragma once

#include <optional>
#include <vector>

#include "mmarket/market.hpp"
#include "mmarket/matching.hpp"

namespace mmarket {

// Spread of each target's rank across all rankings of a profile:
// per_target[x] = max rank(x) - min rank(x); delta = max over x.
struct ProfileDisplacement {
  int delta = 0;
  std::vector<int> per_target;
};

ProfileDisplacement maximal_displacement(const PreferenceProfile& profile);

struct DisplacementSummary {
  int delta_rm = 0;  // over the men's rankings of women
  int delta_rw = 0;  // over the women's rankings of men
  std::vector<int> per_woman;
  std::vector<int> per_man;
};

DisplacementSummary market_displacement(const MarketInstance& instance);

// Largest |rank(i) - (i+1)| over every ranking in a profile: how far any agent
// moves any target away from its central position.
int max_central_displacement(const PreferenceProfile& profile);

struct PairGap {
  int man = 0;
  int woman = 0;
  int mutual_gap = 0;   // |r_m(w) - r_w(m)|
  int central_gap = 0;  // |r(m) - r(w)|
  std::optional<double> quantile_gap;  // |r(m) - r(w)| / n, balanced markets only
};

struct PairGapReport {
  std::vector<PairGap> pairs;  // one per man, ascending
  int max_mutual_gap = 0;
  int max_central_gap = 0;
  std::optional<double> max_quantile_gap;
};

// Gaps of every matched pair. Quantile gaps are populated only when k = 0.
// Throws DimensionMismatch / std::invalid_argument for a matching that does
// not fit the instance or leaves a man single.
PairGapReport pair_gaps(const MarketInstance& instance, const Matching& matching);

struct HolzmanResult {
  bool holds = true;
  int bound = 0;  // 2 * max(delta_rw, delta_rm)
  int max_mutual_gap = 0;
  std::optional<BlockingPair> violation;  // a matched pair exceeding the bound
};

// Checks |r_m(w) - r_w(m)| <= 2 max(Delta(R_W), Delta(R_M)) over matched pairs.
// The matching must be stable; throws InstabilityError otherwise.
HolzmanResult holzman_check(const MarketInstance& instance, const Matching& matching);

struct WelfareReport {
  double a_m = 0.0;  // men's mean rank of their partners
  double a_w = 0.0;  // matched women's mean rank of their partners
};

// Unmatched women are excluded from a_w. Throws std::invalid_argument if a man
// is unmatched.
WelfareReport average_ranks(const MarketInstance& instance, const Matching& matching);

struct WelfareRatios {
  double men_pessimal_over_optimal = 1.0;    // A_M(mu_W) / A_M(mu_M), >= 1
  double women_pessimal_over_optimal = 1.0;  // A_W(mu_M) / A_W(mu_W), >= 1
  double max_women_over_men = 1.0;           // max over members of A_W / A_M
  double max_men_over_women = 1.0;           // max over members of A_M / A_W
};

WelfareRatios welfare_ratios(const MarketInstance& instance, const StableSet& stable_set);

}  // namespace mmarket
