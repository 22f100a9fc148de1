#include <algorithm>
#include <numeric>
#include <string>

#include "mmarket/errors.hpp"
#include "mmarket/matching.hpp"

namespace mmarket {

StableSet brute_force_stable(const MarketInstance& instance) {
  const int men = instance.num_men();
  const int women = instance.num_women();
  if (men > kBruteForceMaxMen || women > kBruteForceMaxWomen) {
    throw ResourceLimitError("brute force is limited to n <= " + std::to_string(kBruteForceMaxMen) +
                             " and n + k <= " + std::to_string(kBruteForceMaxWomen) + ", got n = " +
                             std::to_string(men) + ", n + k = " + std::to_string(women));
  }

  const auto& mp = instance.men;
  const auto& wp = instance.women;
  std::vector<int> husband(static_cast<std::size_t>(women), kUnmatched);
  std::vector<int> wife(static_cast<std::size_t>(men), kUnmatched);
  StableSet out;

  // A pair between two already-assigned men's partners can be judged early;
  // every leaf is still checked against the full definition.
  auto blocks_with_assigned = [&](int m, int w) {
    for (int other = 0; other < m; ++other) {
      const int ow = wife[static_cast<std::size_t>(other)];
      // (m, ow): m prefers ow to w and ow prefers m to other.
      if (mp.rank_unchecked(m, ow) < mp.rank_unchecked(m, w) &&
          wp.rank_unchecked(ow, m) < wp.rank_unchecked(ow, other)) {
        return true;
      }
      // (other, w): other prefers w to ow and w prefers other to m.
      if (mp.rank_unchecked(other, w) < mp.rank_unchecked(other, ow) &&
          wp.rank_unchecked(w, other) < wp.rank_unchecked(w, m)) {
        return true;
      }
    }
    return false;
  };

  auto assign = [&](auto&& self, int m) -> void {
    if (m == men) {
      auto candidate = Matching::from_men(wife, women);
      if (is_stable(instance, candidate)) out.matchings.push_back(std::move(candidate));
      return;
    }
    for (int w = 0; w < women; ++w) {
      if (husband[static_cast<std::size_t>(w)] != kUnmatched) continue;
      if (blocks_with_assigned(m, w)) continue;
      husband[static_cast<std::size_t>(w)] = m;
      wife[static_cast<std::size_t>(m)] = w;
      self(self, m + 1);
      husband[static_cast<std::size_t>(w)] = kUnmatched;
      wife[static_cast<std::size_t>(m)] = kUnmatched;
    }
  };
  assign(assign, 0);

  std::sort(out.matchings.begin(), out.matchings.end());

  // Lattice extremes: the man-optimal matching minimizes the men's total rank
  // (it is weakly best for every man), the woman-optimal the women's.
  auto total_rank = [&](const Matching& mu, Side side) {
    long long sum = 0;
    for (int m = 0; m < men; ++m) {
      const int w = mu.man_to_woman[static_cast<std::size_t>(m)];
      sum += side == Side::Men ? mp.rank_unchecked(m, w) : wp.rank_unchecked(w, m);
    }
    return sum;
  };
  auto argmin = [&](Side side) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.matchings.size(); ++i) {
      if (total_rank(out.matchings[i], side) < total_rank(out.matchings[best], side)) best = i;
    }
    return best;
  };
  if (!out.matchings.empty()) {
    out.man_optimal = argmin(Side::Men);
    out.woman_optimal = argmin(Side::Women);
  }
  return out;
}

}  // namespace mmarket
