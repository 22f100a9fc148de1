#include "mmarket/mallows.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mmarket/errors.hpp"

namespace mmarket {
namespace {

// Fenwick tree over positions 1..size, used both for inversion counting and
// for locating the k-th free slot when assembling a permutation.
class Fenwick {
 public:
  explicit Fenwick(int size) : tree_(static_cast<std::size_t>(size) + 1, 0) {}

  static Fenwick all_ones(int size) {
    Fenwick f(size);
    for (int j = 1; j <= size; ++j) f.tree_[static_cast<std::size_t>(j)] = j & -j;
    return f;
  }

  void add(int pos, int delta) {
    const int n = size();
    for (; pos <= n; pos += pos & -pos) tree_[static_cast<std::size_t>(pos)] += delta;
  }

  int prefix(int pos) const {
    int sum = 0;
    for (; pos > 0; pos -= pos & -pos) sum += tree_[static_cast<std::size_t>(pos)];
    return sum;
  }

  // Smallest pos with prefix(pos) >= k; requires 1 <= k <= prefix(size).
  int find_kth(int k) const {
    const int n = size();
    int pos = 0;
    for (int step = std::bit_floor(static_cast<unsigned>(n)); step > 0; step >>= 1) {
      const int next = pos + step;
      if (next <= n && tree_[static_cast<std::size_t>(next)] < k) {
        pos = next;
        k -= tree_[static_cast<std::size_t>(next)];
      }
    }
    return pos + 1;
  }

  int size() const { return static_cast<int>(tree_.size()) - 1; }

 private:
  std::vector<int> tree_;
};

void check_size(const Permutation& p, const MallowsParams& params) {
  if (p.size() != params.t) {
    throw DimensionMismatch("permutation has " + std::to_string(p.size()) +
                            " elements but params.t = " + std::to_string(params.t));
  }
}

}  // namespace

Permutation::Permutation(std::vector<int> ranks) : ranks_(std::move(ranks)) {
  const auto t = ranks_.size();
  std::vector<char> seen(t, 0);
  for (int r : ranks_) {
    if (r < 1 || static_cast<std::size_t>(r) > t || seen[static_cast<std::size_t>(r - 1)]) {
      throw std::invalid_argument("ranks are not a permutation of 1.." + std::to_string(t));
    }
    seen[static_cast<std::size_t>(r - 1)] = 1;
  }
}

Permutation Permutation::identity(int t) {
  std::vector<int> ranks(static_cast<std::size_t>(t));
  for (int i = 0; i < t; ++i) ranks[static_cast<std::size_t>(i)] = i + 1;
  return Permutation(std::move(ranks));
}

Permutation Permutation::reversal(int t) {
  std::vector<int> ranks(static_cast<std::size_t>(t));
  for (int i = 0; i < t; ++i) ranks[static_cast<std::size_t>(i)] = t - i;
  return Permutation(std::move(ranks));
}

Permutation Permutation::from_order(std::span<const int> order) {
  const int t = static_cast<int>(order.size());
  std::vector<int> ranks(order.size(), 0);
  for (int pos = 0; pos < t; ++pos) {
    const int element = order[static_cast<std::size_t>(pos)];
    if (element < 0 || element >= t || ranks[static_cast<std::size_t>(element)] != 0) {
      throw std::invalid_argument("order vector is not a permutation of 0.." +
                                  std::to_string(t - 1));
    }
    ranks[static_cast<std::size_t>(element)] = pos + 1;
  }
  return Permutation(std::move(ranks));
}

std::vector<int> Permutation::order() const {
  std::vector<int> out(ranks_.size());
  for (std::size_t i = 0; i < ranks_.size(); ++i) {
    out[static_cast<std::size_t>(ranks_[i] - 1)] = static_cast<int>(i);
  }
  return out;
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(ranks_.size());
  for (std::size_t i = 0; i < ranks_.size(); ++i) {
    inv[static_cast<std::size_t>(ranks_[i] - 1)] = static_cast<int>(i) + 1;
  }
  return Permutation(std::move(inv));
}

void MallowsParams::validate() const {
  if (!(phi >= 0.0 && phi <= 1.0)) {
    throw ConfigError("phi must lie in [0, 1], got " + std::to_string(phi));
  }
  if (t < 1) throw ConfigError("t must be positive, got " + std::to_string(t));
}

std::int64_t inversions(const Permutation& p) {
  const int t = p.size();
  Fenwick seen(t);
  std::int64_t count = 0;
  for (int i = t - 1; i >= 0; --i) {
    const int r = p.rank(i);
    count += seen.prefix(r - 1);
    seen.add(r, 1);
  }
  return count;
}

// Factor i of Z is 1 + phi + ... + phi^(i-1), accumulated by Horner's rule so
// the phi -> 1 and phi = 0 endpoints need no special casing.
double log_normalization_constant(const MallowsParams& params) {
  params.validate();
  double log_z = 0.0;
  double partial = 0.0;
  for (int i = 1; i <= params.t; ++i) {
    partial = 1.0 + params.phi * partial;
    log_z += std::log(partial);
  }
  return log_z;
}

double normalization_constant(const MallowsParams& params) {
  params.validate();
  double z = 1.0;
  double partial = 0.0;
  for (int i = 1; i <= params.t; ++i) {
    partial = 1.0 + params.phi * partial;
    z *= partial;
  }
  if (!std::isfinite(z)) {
    throw std::overflow_error("normalization constant overflows a double at t = " +
                              std::to_string(params.t) + "; use log_normalization_constant");
  }
  return z;
}

double log_pmf(const Permutation& p, const MallowsParams& params) {
  params.validate();
  check_size(p, params);
  const auto inv = inversions(p);
  if (params.phi == 0.0) {
    return inv == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(inv) * std::log(params.phi) - log_normalization_constant(params);
}

double pmf(const Permutation& p, const MallowsParams& params) {
  params.validate();
  check_size(p, params);
  if (params.t > 20) return std::exp(log_pmf(p, params));
  const auto inv = inversions(p);
  if (params.phi == 0.0) return inv == 0 ? 1.0 : 0.0;
  return std::pow(params.phi, static_cast<double>(inv)) / normalization_constant(params);
}

std::vector<int> sample_insertion_codes(const MallowsParams& params, Rng& rng) {
  params.validate();
  std::vector<int> codes(static_cast<std::size_t>(params.t), 0);
  if (params.phi == 0.0) return codes;
  if (params.phi == 1.0) {
    for (int i = 1; i <= params.t; ++i) {
      codes[static_cast<std::size_t>(i - 1)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(i)));
    }
    return codes;
  }
  // Truncated geometric on [0, i-1] by inverse CDF:
  //   P(V <= v) = (1 - phi^(v+1)) / (1 - phi^i)  =>  V = floor(ln(1 - u (1 - phi^i)) / ln phi).
  const double log_phi = std::log(params.phi);
  double phi_pow = 1.0;
  for (int i = 1; i <= params.t; ++i) {
    phi_pow *= params.phi;
    const double u = rng.uniform();
    const double x = std::log1p(-u * (1.0 - phi_pow)) / log_phi;
    int v = x < static_cast<double>(i) ? static_cast<int>(x) : i - 1;
    codes[static_cast<std::size_t>(i - 1)] = std::clamp(v, 0, i - 1);
  }
  return codes;
}

Permutation build_by_list_insertion(std::span<const int> codes) {
  std::vector<int> order;
  order.reserve(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    order.insert(order.end() - codes[i], static_cast<int>(i));
  }
  return Permutation::from_order(order);
}

// Element i ends up as the (i + 1 - v_i)-th smallest of the positions not
// claimed by elements inserted after it, so walking backwards with a
// k-th-free-slot query places every element in O(log t).
Permutation build_by_order_statistics(std::span<const int> codes) {
  const int t = static_cast<int>(codes.size());
  std::vector<int> ranks(codes.size());
  if (t == 0) return Permutation(std::move(ranks));
  auto free_slots = Fenwick::all_ones(t);
  for (int i = t - 1; i >= 0; --i) {
    const int pos = free_slots.find_kth(i + 1 - codes[static_cast<std::size_t>(i)]);
    free_slots.add(pos, -1);
    ranks[static_cast<std::size_t>(i)] = pos;
  }
  return Permutation(std::move(ranks));
}

Permutation sample(const MallowsParams& params, Rng& rng) {
  const auto codes = sample_insertion_codes(params, rng);
  // List insertion shifts v_i entries per step; the Fenwick route costs log t.
  const double mean_code =
      params.phi < 1.0 ? params.phi / (1.0 - params.phi) : static_cast<double>(params.t) / 2.0;
  const double log_t = static_cast<double>(std::bit_width(static_cast<unsigned>(params.t)));
  if (mean_code <= 2.0 * log_t) return build_by_list_insertion(codes);
  return build_by_order_statistics(codes);
}

DisplacementStats displacement_stats(const Permutation& p) {
  DisplacementStats stats;
  stats.per_element.resize(static_cast<std::size_t>(p.size()));
  for (int i = 0; i < p.size(); ++i) {
    const int d = std::abs(p.rank(i) - (i + 1));
    stats.per_element[static_cast<std::size_t>(i)] = d;
    stats.max_abs_displacement = std::max(stats.max_abs_displacement, d);
  }
  return stats;
}

int max_displacement(const Permutation& p) {
  int best = 0;
  for (int i = 0; i < p.size(); ++i) best = std::max(best, std::abs(p.rank(i) - (i + 1)));
  return best;
}

double tail_bound(int d, double phi) {
  if (!(phi > 0.0 && phi < 1.0)) {
    throw std::domain_error("tail_bound requires 0 < phi < 1, got " + std::to_string(phi));
  }
  if (d < 1) throw std::domain_error("tail_bound requires d >= 1, got " + std::to_string(d));
  return 2.0 * std::pow(phi, d);
}

}  // namespace mmarket
