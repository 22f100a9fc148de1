#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mmarket/rng.hpp"

namespace mmarket {

// A ranking of t items in rank-vector form.
//
// Elements are indexed 0..t-1 and ranks are 1-based: rank(i) is the position
// that element i occupies, 1 being the top. The identity permutation is the
// central order. The order-vector view (element at each position) is
// available through order() / from_order().
class Permutation {
 public:
  Permutation() = default;

  // Takes 1-based ranks; throws std::invalid_argument unless they form a
  // bijection onto {1..t}.
  explicit Permutation(std::vector<int> ranks);

  static Permutation identity(int t);
  static Permutation reversal(int t);
  // order[p] is the 0-based element placed at 1-based position p+1.
  static Permutation from_order(std::span<const int> order);

  int size() const { return static_cast<int>(ranks_.size()); }
  int rank(int element) const { return ranks_[static_cast<std::size_t>(element)]; }
  std::span<const int> ranks() const { return ranks_; }

  // 0-based elements listed from rank 1 down to rank t.
  std::vector<int> order() const;
  Permutation inverse() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> ranks_;
};

struct MallowsParams {
  double phi = 1.0;  // correlation coefficient in [0, 1]; 1 is uniform
  int t = 1;         // number of ranked elements

  // Throws ConfigError when phi is outside [0, 1] or t < 1.
  void validate() const;
};

struct DisplacementStats {
  int max_abs_displacement = 0;
  std::vector<int> per_element;  // |rank(i) - (i+1)|
};

// Number of pairs i < j with rank(i) > rank(j). O(t log t).
std::int64_t inversions(const Permutation& p);

// Z(phi, t) = sum over S_t of phi^inv = prod_{i=1..t} (1 - phi^i) / (1 - phi).
// phi = 1 gives t!, phi = 0 gives 1. Throws std::overflow_error when the value
// is not representable as a double; log_normalization_constant never overflows.
double normalization_constant(const MallowsParams& params);
double log_normalization_constant(const MallowsParams& params);

// Mallows probability phi^inv(p) / Z. Throws DimensionMismatch if p.size() != t.
// Computed in log space for t > 20.
double pmf(const Permutation& p, const MallowsParams& params);
double log_pmf(const Permutation& p, const MallowsParams& params);

// Draws the insertion codes v_1..v_t of the repeated-insertion method:
// v_i in [0, i-1] with P(v_i = v) proportional to phi^v. Element i-1 (0-based)
// is inserted with exactly v_i of the previously inserted elements ranked
// after it, so inv of the result equals sum of v_i.
std::vector<int> sample_insertion_codes(const MallowsParams& params, Rng& rng);

// Assembles a permutation from insertion codes. Both builders give the same
// result; sample() picks whichever is cheaper for the expected code sizes.
Permutation build_by_list_insertion(std::span<const int> codes);
Permutation build_by_order_statistics(std::span<const int> codes);

// Exact Mallows(phi, t) draw. Deterministic in the state of rng.
Permutation sample(const MallowsParams& params, Rng& rng);

DisplacementStats displacement_stats(const Permutation& p);

// Largest |rank(i) - (i+1)| without materializing per-element values.
int max_displacement(const Permutation& p);

// 2 * phi^d, the ceiling on P(|rank(i) - i| >= d) for a Mallows draw.
// Throws std::domain_error unless 0 < phi < 1 and d >= 1.
double tail_bound(int d, double phi);

}  // namespace mmarket
