#include "mmarket/metrics.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "mmarket/errors.hpp"

namespace mmarket {
namespace {

void require_men_matched(const MarketInstance& instance, const Matching& matching) {
  if (matching.num_men() != instance.num_men() || matching.num_women() != instance.num_women()) {
    throw DimensionMismatch("matching does not fit the instance");
  }
  if (!matching.is_consistent()) {
    throw std::invalid_argument("matching is inconsistent or leaves a man unmatched");
  }
}

}  // namespace

ProfileDisplacement maximal_displacement(const PreferenceProfile& profile) {
  const int targets = profile.num_targets();
  std::vector<int> lo(static_cast<std::size_t>(targets), targets + 1);
  std::vector<int> hi(static_cast<std::size_t>(targets), 0);
  for (const auto& ranking : profile.rankings()) {
    const auto ranks = ranking.ranks();
    for (std::size_t x = 0; x < ranks.size(); ++x) {
      lo[x] = std::min(lo[x], ranks[x]);
      hi[x] = std::max(hi[x], ranks[x]);
    }
  }
  ProfileDisplacement out;
  out.per_target.assign(static_cast<std::size_t>(targets), 0);
  if (profile.num_agents() == 0) return out;
  for (std::size_t x = 0; x < out.per_target.size(); ++x) {
    out.per_target[x] = hi[x] - lo[x];
    out.delta = std::max(out.delta, out.per_target[x]);
  }
  return out;
}

DisplacementSummary market_displacement(const MarketInstance& instance) {
  auto men = maximal_displacement(instance.men);
  auto women = maximal_displacement(instance.women);
  return {men.delta, women.delta, std::move(men.per_target), std::move(women.per_target)};
}

int max_central_displacement(const PreferenceProfile& profile) {
  int best = 0;
  for (const auto& ranking : profile.rankings()) best = std::max(best, max_displacement(ranking));
  return best;
}

PairGapReport pair_gaps(const MarketInstance& instance, const Matching& matching) {
  require_men_matched(instance, matching);
  const bool balanced = instance.config.k == 0;
  const double n = static_cast<double>(instance.num_men());
  PairGapReport report;
  report.pairs.reserve(static_cast<std::size_t>(instance.num_men()));
  if (balanced) report.max_quantile_gap = 0.0;
  for (int m = 0; m < instance.num_men(); ++m) {
    const int w = matching.man_to_woman[static_cast<std::size_t>(m)];
    PairGap gap;
    gap.man = m;
    gap.woman = w;
    gap.mutual_gap = std::abs(instance.men.rank_unchecked(m, w) - instance.women.rank_unchecked(w, m));
    gap.central_gap = std::abs(central_rank(m) - central_rank(w));
    if (balanced) {
      gap.quantile_gap = static_cast<double>(gap.central_gap) / n;
      report.max_quantile_gap = std::max(*report.max_quantile_gap, *gap.quantile_gap);
    }
    report.max_mutual_gap = std::max(report.max_mutual_gap, gap.mutual_gap);
    report.max_central_gap = std::max(report.max_central_gap, gap.central_gap);
    report.pairs.push_back(gap);
  }
  return report;
}

HolzmanResult holzman_check(const MarketInstance& instance, const Matching& matching) {
  require_men_matched(instance, matching);
  const auto blocking = blocking_pairs(instance, matching);
  if (!blocking.empty()) {
    throw InstabilityError("holzman_check needs a stable matching; (m" +
                           std::to_string(blocking.front().man + 1) + ", w" +
                           std::to_string(blocking.front().woman + 1) + ") blocks it");
  }
  const auto disp = market_displacement(instance);
  HolzmanResult result;
  result.bound = 2 * std::max(disp.delta_rw, disp.delta_rm);
  for (int m = 0; m < instance.num_men(); ++m) {
    const int w = matching.man_to_woman[static_cast<std::size_t>(m)];
    const int gap = std::abs(instance.men.rank_unchecked(m, w) - instance.women.rank_unchecked(w, m));
    result.max_mutual_gap = std::max(result.max_mutual_gap, gap);
    if (gap > result.bound && result.holds) {
      result.holds = false;
      result.violation = BlockingPair{m, w};
    }
  }
  return result;
}

WelfareReport average_ranks(const MarketInstance& instance, const Matching& matching) {
  require_men_matched(instance, matching);
  long long men_total = 0;
  long long women_total = 0;
  for (int m = 0; m < instance.num_men(); ++m) {
    const int w = matching.man_to_woman[static_cast<std::size_t>(m)];
    men_total += instance.men.rank_unchecked(m, w);
    women_total += instance.women.rank_unchecked(w, m);
  }
  // Exactly n women are matched, one per man.
  const double n = static_cast<double>(instance.num_men());
  return {static_cast<double>(men_total) / n, static_cast<double>(women_total) / n};
}

WelfareRatios welfare_ratios(const MarketInstance& instance, const StableSet& stable_set) {
  if (stable_set.matchings.empty() || stable_set.man_optimal >= stable_set.matchings.size() ||
      stable_set.woman_optimal >= stable_set.matchings.size()) {
    throw std::invalid_argument("stable set must contain both extreme matchings");
  }
  const auto at_men_opt = average_ranks(instance, stable_set.matchings[stable_set.man_optimal]);
  const auto at_women_opt = average_ranks(instance, stable_set.matchings[stable_set.woman_optimal]);
  WelfareRatios ratios;
  ratios.men_pessimal_over_optimal = at_women_opt.a_m / at_men_opt.a_m;
  ratios.women_pessimal_over_optimal = at_men_opt.a_w / at_women_opt.a_w;
  ratios.max_women_over_men = 0.0;
  ratios.max_men_over_women = 0.0;
  for (const auto& mu : stable_set.matchings) {
    const auto w = average_ranks(instance, mu);
    ratios.max_women_over_men = std::max(ratios.max_women_over_men, w.a_w / w.a_m);
    ratios.max_men_over_women = std::max(ratios.max_men_over_women, w.a_m / w.a_w);
  }
  return ratios;
}

}  // namespace mmarket
