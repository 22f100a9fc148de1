#include <algorithm>
#include <stdexcept>
#include <string>

#include "mmarket/matching.hpp"

namespace mmarket {
namespace {

constexpr int kNoRotation = -1;

// Dense (man, woman) -> rotation id table.
class PairLabels {
 public:
  PairLabels(int men, int women)
      : women_(women), labels_(static_cast<std::size_t>(men) * static_cast<std::size_t>(women), kNoRotation) {}

  int& at(int m, int w) {
    return labels_[static_cast<std::size_t>(m) * static_cast<std::size_t>(women_) + static_cast<std::size_t>(w)];
  }

 private:
  int women_;
  std::vector<int> labels_;
};

// First woman after mu(m) on m's list who prefers m to her current partner.
// In a stable matching that is not woman-optimal for m this woman exists and
// is matched, because every woman m ranks above his worst stable partner is.
int next_willing_woman(const MarketInstance& instance, const Matching& mu,
                       const std::vector<std::vector<int>>& men_lists, int m) {
  const auto& list = men_lists[static_cast<std::size_t>(m)];
  const int current_rank = instance.men.rank_unchecked(m, mu.man_to_woman[static_cast<std::size_t>(m)]);
  for (std::size_t pos = static_cast<std::size_t>(current_rank); pos < list.size(); ++pos) {
    const int w = list[pos];
    const int her = mu.woman_to_man[static_cast<std::size_t>(w)];
    if (her == kUnmatched) {
      throw std::logic_error("rotation search reached an unmatched woman; matching is not stable");
    }
    if (instance.women.rank_unchecked(w, m) < instance.women.rank_unchecked(w, her)) return w;
  }
  throw std::logic_error("man " + std::to_string(m) + " has no willing woman below his partner");
}

// Follows next(m) = mu(s(m)) from `start` until a man repeats; the cycle is an
// exposed rotation.
Rotation find_exposed_rotation(const MarketInstance& instance, const Matching& mu,
                               const std::vector<std::vector<int>>& men_lists, int start) {
  std::vector<int> position(static_cast<std::size_t>(instance.num_men()), -1);
  std::vector<int> walk;
  std::vector<int> target;
  int m = start;
  while (position[static_cast<std::size_t>(m)] == -1) {
    position[static_cast<std::size_t>(m)] = static_cast<int>(walk.size());
    walk.push_back(m);
    const int w = next_willing_woman(instance, mu, men_lists, m);
    target.push_back(w);
    m = mu.woman_to_man[static_cast<std::size_t>(w)];
  }
  Rotation rot;
  for (auto i = static_cast<std::size_t>(position[static_cast<std::size_t>(m)]); i < walk.size(); ++i) {
    rot.pairs.emplace_back(walk[i], mu.man_to_woman[static_cast<std::size_t>(walk[i])]);
  }
  return rot;
}

}  // namespace

void eliminate(Matching& matching, const Rotation& rotation) {
  const auto r = rotation.pairs.size();
  for (std::size_t i = 0; i < r; ++i) {
    const int m = rotation.pairs[i].first;
    const int w = rotation.pairs[(i + 1) % r].second;
    matching.man_to_woman[static_cast<std::size_t>(m)] = w;
    matching.woman_to_man[static_cast<std::size_t>(w)] = m;
  }
}

void restore(Matching& matching, const Rotation& rotation) {
  for (const auto& [m, w] : rotation.pairs) {
    matching.man_to_woman[static_cast<std::size_t>(m)] = w;
    matching.woman_to_man[static_cast<std::size_t>(w)] = m;
  }
}

RotationPoset build_rotation_poset(const MarketInstance& instance) {
  RotationPoset poset;
  poset.man_optimal = deferred_acceptance(instance, Side::Men);
  poset.woman_optimal = deferred_acceptance(instance, Side::Women);
  if (poset.man_optimal == poset.woman_optimal) return poset;

  const int men = instance.num_men();
  const int women = instance.num_women();
  std::vector<std::vector<int>> men_lists(static_cast<std::size_t>(men));
  for (int m = 0; m < men; ++m) men_lists[static_cast<std::size_t>(m)] = instance.men.preference_list(m);

  // Every rotation appears exactly once on any maximal chain from the
  // man-optimal to the woman-optimal matching, and the chain order is a
  // linear extension of the precedence relation.
  Matching mu = poset.man_optimal;
  int scan = 0;
  while (true) {
    while (scan < men && mu.man_to_woman[static_cast<std::size_t>(scan)] ==
                             poset.woman_optimal.man_to_woman[static_cast<std::size_t>(scan)]) {
      ++scan;
    }
    if (scan == men) break;
    Rotation rot = find_exposed_rotation(instance, mu, men_lists, scan);
    eliminate(mu, rot);
    poset.rotations.push_back(std::move(rot));
  }

  // label(x, w) is the rotation in which woman w's partner moves from a man she
  // ranks below x to one she ranks at or above x. Rotation rho needs label(m, w)
  // eliminated first for each of its men m and every w from m's current
  // partner (inclusive, which yields the rotation producing that pair) down to
  // his next partner (exclusive, the women he skips).
  PairLabels label(men, women);
  const auto num_rotations = static_cast<int>(poset.rotations.size());
  for (int id = 0; id < num_rotations; ++id) {
    const auto& pairs = poset.rotations[static_cast<std::size_t>(id)].pairs;
    const auto r = pairs.size();
    for (std::size_t j = 0; j < r; ++j) {
      const int w = pairs[j].second;
      const int old_man = pairs[j].first;
      const int new_man = pairs[(j + r - 1) % r].first;
      const int best = instance.women.rank_unchecked(w, new_man);
      const int worst = instance.women.rank_unchecked(w, old_man);
      for (int x = 0; x < men; ++x) {
        const int rx = instance.women.rank_unchecked(w, x);
        if (rx >= best && rx < worst) label.at(x, w) = id;
      }
    }
  }

  poset.predecessors.resize(static_cast<std::size_t>(num_rotations));
  for (int id = 0; id < num_rotations; ++id) {
    const auto& pairs = poset.rotations[static_cast<std::size_t>(id)].pairs;
    const auto r = pairs.size();
    auto& preds = poset.predecessors[static_cast<std::size_t>(id)];
    for (std::size_t i = 0; i < r; ++i) {
      const int m = pairs[i].first;
      const int from = instance.men.rank_unchecked(m, pairs[i].second);
      const int to = instance.men.rank_unchecked(m, pairs[(i + 1) % r].second);
      const auto& list = men_lists[static_cast<std::size_t>(m)];
      for (int rank = from; rank < to; ++rank) {
        const int pred = label.at(m, list[static_cast<std::size_t>(rank - 1)]);
        if (pred == kNoRotation || pred == id) continue;
        if (pred > id) throw std::logic_error("rotation precedence contradicts chain order");
        preds.push_back(pred);
      }
    }
    std::sort(preds.begin(), preds.end());
    preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
  }
  return poset;
}

StableSet enumerate_stable(const MarketInstance& instance, std::size_t cap) {
  if (cap < 2) throw std::invalid_argument("enumeration cap must be at least 2");
  const RotationPoset poset = build_rotation_poset(instance);
  StableSet out;
  const auto num_rotations = poset.rotations.size();
  if (num_rotations == 0) {
    out.matchings.push_back(poset.man_optimal);
    return out;
  }

  // Depth-first walk over closed subsets in chain order: rotation i may be
  // included only when all its predecessors are. Excluding first emits the
  // man-optimal matching first and the woman-optimal (all included) last.
  std::vector<char> included(num_rotations, 0);
  Matching mu = poset.man_optimal;
  bool stop = false;

  auto emit = [&](bool is_last) {
    if (out.matchings.size() + 1 < cap || is_last) {
      out.matchings.push_back(mu);
    } else {
      out.truncated = true;
      stop = true;
    }
  };

  auto visit = [&](auto&& self, std::size_t i, bool all_included) -> void {
    if (stop) return;
    if (i == num_rotations) {
      emit(all_included);
      return;
    }
    self(self, i + 1, false);
    if (stop) return;
    const auto& preds = poset.predecessors[i];
    const bool ready = std::all_of(preds.begin(), preds.end(),
                                   [&](int p) { return included[static_cast<std::size_t>(p)] != 0; });
    if (!ready) return;
    included[i] = 1;
    eliminate(mu, poset.rotations[i]);
    self(self, i + 1, all_included);
    restore(mu, poset.rotations[i]);
    included[i] = 0;
  };
  visit(visit, 0, true);

  if (out.truncated) out.matchings.push_back(poset.woman_optimal);
  out.man_optimal = 0;
  out.woman_optimal = out.matchings.size() - 1;
  return out;
}

}  // namespace mmarket
