#include "mmarket/matching.hpp"

#include <stdexcept>
#include <string>

#include "mmarket/errors.hpp"

namespace mmarket {
namespace {

// McVitie-Wilson formulation of deferred acceptance: each proposer in turn
// proposes down its list until held; a displaced proposer resumes at once.
// Returns, for every receiver, the proposer it holds (or kUnmatched).
std::vector<int> run_deferred_acceptance(const PreferenceProfile& proposers,
                                         const PreferenceProfile& receivers,
                                         std::int64_t& proposals) {
  const int num_proposers = proposers.num_agents();
  const int list_length = proposers.num_targets();
  std::vector<int> held_by(static_cast<std::size_t>(receivers.num_agents()), kUnmatched);
  std::vector<int> next_choice(static_cast<std::size_t>(num_proposers), 0);
  std::vector<std::vector<int>> lists(static_cast<std::size_t>(num_proposers));

  for (int first = 0; first < num_proposers; ++first) {
    int p = first;
    while (p != kUnmatched) {
      auto& list = lists[static_cast<std::size_t>(p)];
      if (list.empty()) list = proposers.preference_list(p);
      int& next = next_choice[static_cast<std::size_t>(p)];
      if (next == list_length) break;  // exhausted: stays single
      const int r = list[static_cast<std::size_t>(next++)];
      ++proposals;
      int& holder = held_by[static_cast<std::size_t>(r)];
      if (holder == kUnmatched) {
        holder = p;
        p = kUnmatched;
      } else if (receivers.rank_unchecked(r, p) < receivers.rank_unchecked(r, holder)) {
        std::swap(holder, p);
      }
    }
  }
  return held_by;
}

void check_dimensions(const MarketInstance& instance, const Matching& matching) {
  if (matching.num_men() != instance.num_men() || matching.num_women() != instance.num_women()) {
    throw DimensionMismatch("matching covers " + std::to_string(matching.num_men()) + " men / " +
                            std::to_string(matching.num_women()) + " women but the instance has " +
                            std::to_string(instance.num_men()) + " / " +
                            std::to_string(instance.num_women()));
  }
  for (int w : matching.man_to_woman) {
    if (w != kUnmatched && (w < 0 || w >= matching.num_women())) {
      throw std::invalid_argument("matching refers to unknown woman " + std::to_string(w));
    }
  }
  for (int m : matching.woman_to_man) {
    if (m != kUnmatched && (m < 0 || m >= matching.num_men())) {
      throw std::invalid_argument("matching refers to unknown man " + std::to_string(m));
    }
  }
}

}  // namespace

std::vector<int> Matching::unmatched_women() const {
  std::vector<int> out;
  for (int w = 0; w < num_women(); ++w) {
    if (woman_to_man[static_cast<std::size_t>(w)] == kUnmatched) out.push_back(w);
  }
  return out;
}

bool Matching::is_consistent() const {
  const int men = num_men();
  const int women = num_women();
  int matched_women = 0;
  for (int m = 0; m < men; ++m) {
    const int w = man_to_woman[static_cast<std::size_t>(m)];
    if (w < 0 || w >= women || woman_to_man[static_cast<std::size_t>(w)] != m) return false;
  }
  for (int w = 0; w < women; ++w) {
    const int m = woman_to_man[static_cast<std::size_t>(w)];
    if (m == kUnmatched) continue;
    if (m < 0 || m >= men || man_to_woman[static_cast<std::size_t>(m)] != w) return false;
    ++matched_women;
  }
  return matched_women == men;
}

Matching Matching::from_men(std::vector<int> man_to_woman, int num_women) {
  Matching out;
  out.woman_to_man.assign(static_cast<std::size_t>(num_women), kUnmatched);
  for (std::size_t m = 0; m < man_to_woman.size(); ++m) {
    const int w = man_to_woman[m];
    if (w < 0 || w >= num_women) {
      throw std::invalid_argument("man " + std::to_string(m) + " assigned to unknown woman " +
                                  std::to_string(w));
    }
    if (out.woman_to_man[static_cast<std::size_t>(w)] != kUnmatched) {
      throw std::invalid_argument("woman " + std::to_string(w) + " assigned twice");
    }
    out.woman_to_man[static_cast<std::size_t>(w)] = static_cast<int>(m);
  }
  out.man_to_woman = std::move(man_to_woman);
  return out;
}

Matching deferred_acceptance(const MarketInstance& instance, Side proposing, DaStats* stats) {
  std::int64_t proposals = 0;
  Matching out;
  if (proposing == Side::Men) {
    out.woman_to_man = run_deferred_acceptance(instance.men, instance.women, proposals);
    out.man_to_woman.assign(static_cast<std::size_t>(instance.num_men()), kUnmatched);
    for (int w = 0; w < instance.num_women(); ++w) {
      const int m = out.woman_to_man[static_cast<std::size_t>(w)];
      if (m != kUnmatched) out.man_to_woman[static_cast<std::size_t>(m)] = w;
    }
  } else {
    out.man_to_woman = run_deferred_acceptance(instance.women, instance.men, proposals);
    out.woman_to_man.assign(static_cast<std::size_t>(instance.num_women()), kUnmatched);
    for (int m = 0; m < instance.num_men(); ++m) {
      const int w = out.man_to_woman[static_cast<std::size_t>(m)];
      if (w != kUnmatched) out.woman_to_man[static_cast<std::size_t>(w)] = m;
    }
  }
  if (stats != nullptr) stats->proposals = proposals;
  return out;
}

std::vector<BlockingPair> blocking_pairs(const MarketInstance& instance, const Matching& matching) {
  check_dimensions(instance, matching);
  const int women = instance.num_women();
  std::vector<BlockingPair> out;
  for (int m = 0; m < instance.num_men(); ++m) {
    const int partner = matching.man_to_woman[static_cast<std::size_t>(m)];
    const int partner_rank = partner == kUnmatched ? women + 1 : instance.men.rank_unchecked(m, partner);
    for (int w = 0; w < women; ++w) {
      if (instance.men.rank_unchecked(m, w) >= partner_rank) continue;
      const int her = matching.woman_to_man[static_cast<std::size_t>(w)];
      if (her == kUnmatched ||
          instance.women.rank_unchecked(w, m) < instance.women.rank_unchecked(w, her)) {
        out.push_back({m, w});
      }
    }
  }
  return out;
}

bool is_stable(const MarketInstance& instance, const Matching& matching) {
  check_dimensions(instance, matching);
  return matching.is_consistent() && blocking_pairs(instance, matching).empty();
}

}  // namespace mmarket
