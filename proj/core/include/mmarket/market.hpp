#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mmarket/mallows.hpp"

namespace mmarket {

enum class Side { Men, Women };

constexpr Side opposite(Side s) { return s == Side::Men ? Side::Women : Side::Men; }
const char* to_string(Side s);

// n men, n + k women. Men rank all n + k women with Mallows(phi_m, n + k);
// women rank all n men with Mallows(phi_w, n).
struct MarketConfig {
  int n = 1;
  int k = 0;
  double phi_m = 1.0;
  double phi_w = 1.0;
  std::uint64_t seed = 0;

  int num_men() const { return n; }
  int num_women() const { return n + k; }

  // Throws ConfigError for n < 1, k < 0 or a coefficient outside [0, 1].
  void validate() const;

  friend bool operator==(const MarketConfig&, const MarketConfig&) = default;
};

inline constexpr int kDefaultMaxAgentsPerSide = 200'000;

struct GenerateOptions {
  int max_agents_per_side = kDefaultMaxAgentsPerSide;  // cap on n + k
};

// Every agent's ranking of the opposite side. Agents and targets are 0-based;
// index i is also the agent's place in the central order (central rank i + 1).
class PreferenceProfile {
 public:
  PreferenceProfile() = default;
  PreferenceProfile(Side side, int num_targets, std::vector<Permutation> rankings);

  Side side() const { return side_; }
  int num_agents() const { return static_cast<int>(rankings_.size()); }
  int num_targets() const { return num_targets_; }

  const Permutation& ranking(int agent) const;
  std::span<const Permutation> rankings() const { return rankings_; }

  // 1-based position of target in agent's list (1 = most preferred).
  // Throws std::out_of_range for unknown ids.
  int rank_of(int agent, int target) const;

  // Unchecked rank lookup for inner loops.
  int rank_unchecked(int agent, int target) const {
    return rankings_[static_cast<std::size_t>(agent)].rank(target);
  }

  // Targets of agent from most to least preferred.
  std::vector<int> preference_list(int agent) const { return ranking(agent).order(); }

  friend bool operator==(const PreferenceProfile&, const PreferenceProfile&) = default;

 private:
  Side side_ = Side::Men;
  int num_targets_ = 0;
  std::vector<Permutation> rankings_;
};

struct MarketInstance {
  MarketConfig config;
  PreferenceProfile men;    // side Men, rankings over n + k women
  PreferenceProfile women;  // side Women, rankings over n men

  int num_men() const { return config.num_men(); }
  int num_women() const { return config.num_women(); }

  const PreferenceProfile& profile(Side s) const { return s == Side::Men ? men : women; }

  friend bool operator==(const MarketInstance&, const MarketInstance&) = default;
};

// Seed of the random stream that draws one agent's ranking:
//   derive_seed(derive_seed(config.seed, side tag), agent index)
// with side tag 1 for men and 2 for women. Rankings are therefore independent
// of generation order.
std::uint64_t agent_seed(std::uint64_t market_seed, Side side, int agent);

// Draws a complete market. Pure function of config.
// Throws ResourceLimitError when n + k exceeds options.max_agents_per_side.
MarketInstance generate(const MarketConfig& config, const GenerateOptions& options = {});

// Builds an instance from explicit preference lists (0-based ids, best first).
// men_lists[m] must be a permutation of the n + k women and women_lists[w] a
// permutation of the n men. The config's phi/seed are carried as metadata.
MarketInstance make_instance(const MarketConfig& config,
                             const std::vector<std::vector<int>>& men_lists,
                             const std::vector<std::vector<int>>& women_lists);

// An agent's rank in the central order: index + 1.
constexpr int central_rank(int agent) { return agent + 1; }

}  // namespace mmarket
