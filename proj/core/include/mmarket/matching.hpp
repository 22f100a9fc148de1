#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "mmarket/market.hpp"

namespace mmarket {

inline constexpr int kUnmatched = -1;

// One-to-one assignment. Men are always matched in this model; women may be
// unmatched (kUnmatched). Ids are 0-based.
struct Matching {
  std::vector<int> man_to_woman;
  std::vector<int> woman_to_man;

  int num_men() const { return static_cast<int>(man_to_woman.size()); }
  int num_women() const { return static_cast<int>(woman_to_man.size()); }

  // Women with no partner, ascending.
  std::vector<int> unmatched_women() const;

  // man_to_woman[m] == w iff woman_to_man[w] == m, every man matched, ids in range.
  bool is_consistent() const;

  // Builds both views from the men's side; throws std::invalid_argument if two
  // men share a woman or an id is out of range.
  static Matching from_men(std::vector<int> man_to_woman, int num_women);

  friend bool operator==(const Matching&, const Matching&) = default;
  friend auto operator<=>(const Matching& a, const Matching& b) {
    return a.man_to_woman <=> b.man_to_woman;
  }
};

struct BlockingPair {
  int man = 0;
  int woman = 0;
  friend bool operator==(const BlockingPair&, const BlockingPair&) = default;
};

struct StableSet {
  std::vector<Matching> matchings;
  bool truncated = false;
  std::size_t man_optimal = 0;
  std::size_t woman_optimal = 0;
};

struct DaStats {
  std::int64_t proposals = 0;
};

// Gale-Shapley deferred acceptance; returns the proposing side's optimal stable
// matching. Proposers are processed in ascending index order.
Matching deferred_acceptance(const MarketInstance& instance, Side proposing,
                             DaStats* stats = nullptr);

// All pairs (m, w) where m prefers w to his partner and w prefers m to hers
// (an unmatched woman prefers any man), sorted by (man, woman).
// Throws DimensionMismatch if the matching does not fit the instance.
std::vector<BlockingPair> blocking_pairs(const MarketInstance& instance, const Matching& matching);

// No blocking pair and the matching is internally consistent.
bool is_stable(const MarketInstance& instance, const Matching& matching);

// A rotation exposed in some stable matching: pairs (m_i, w_i) in cyclic order.
// Eliminating it matches m_i to w_{i+1}.
struct Rotation {
  std::vector<std::pair<int, int>> pairs;
};

// Rotations of an instance in a topological order of the rotation poset, with
// the direct precedence edges (predecessors[r] lists rotations that must be
// eliminated before r; all have index < r).
struct RotationPoset {
  Matching man_optimal;
  Matching woman_optimal;
  std::vector<Rotation> rotations;
  std::vector<std::vector<int>> predecessors;
};

RotationPoset build_rotation_poset(const MarketInstance& instance);

// Applies (or undoes) a rotation in place.
void eliminate(Matching& matching, const Rotation& rotation);
void restore(Matching& matching, const Rotation& rotation);

// All stable matchings via closed subsets of the rotation poset, man-optimal
// first and woman-optimal last. At most `cap` matchings are returned; when the
// set is larger the result is a prefix plus the woman-optimal matching and
// `truncated` is set. Throws std::invalid_argument for cap < 2.
StableSet enumerate_stable(const MarketInstance& instance, std::size_t cap);

inline constexpr int kBruteForceMaxMen = 9;
inline constexpr int kBruteForceMaxWomen = 10;

// Exhaustive oracle: every injective assignment of men to women, filtered by
// stability. Matchings are sorted by man_to_woman. Throws ResourceLimitError
// when n > 9 or n + k > 10.
StableSet brute_force_stable(const MarketInstance& instance);

}  // namespace mmarket
