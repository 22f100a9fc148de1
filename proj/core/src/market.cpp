#include "mmarket/market.hpp"

#include <stdexcept>
#include <string>

#include "mmarket/errors.hpp"

namespace mmarket {
namespace {

constexpr std::uint64_t side_tag(Side s) { return s == Side::Men ? 1 : 2; }

std::vector<Permutation> draw_rankings(const MarketConfig& config, Side side) {
  const bool men = side == Side::Men;
  const MallowsParams params{men ? config.phi_m : config.phi_w,
                             men ? config.num_women() : config.num_men()};
  const int agents = men ? config.num_men() : config.num_women();
  std::vector<Permutation> rankings;
  rankings.reserve(static_cast<std::size_t>(agents));
  for (int a = 0; a < agents; ++a) {
    Rng rng(agent_seed(config.seed, side, a));
    rankings.push_back(sample(params, rng));
  }
  return rankings;
}

std::vector<Permutation> lists_to_rankings(const std::vector<std::vector<int>>& lists,
                                           int expected_agents, int expected_targets,
                                           const char* what) {
  if (static_cast<int>(lists.size()) != expected_agents) {
    throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(expected_agents) +
                            " preference lists, got " + std::to_string(lists.size()));
  }
  std::vector<Permutation> rankings;
  rankings.reserve(lists.size());
  for (const auto& list : lists) {
    if (static_cast<int>(list.size()) != expected_targets) {
      throw DimensionMismatch(std::string(what) + ": preference list of length " +
                              std::to_string(list.size()) + ", expected " +
                              std::to_string(expected_targets));
    }
    rankings.push_back(Permutation::from_order(list));
  }
  return rankings;
}

}  // namespace

const char* to_string(Side s) { return s == Side::Men ? "men" : "women"; }

void MarketConfig::validate() const {
  if (n < 1) throw ConfigError("market needs n >= 1 men, got " + std::to_string(n));
  if (k < 0) throw ConfigError("excess women k must be >= 0, got " + std::to_string(k));
  if (!(phi_m >= 0.0 && phi_m <= 1.0)) {
    throw ConfigError("phi_m must lie in [0, 1], got " + std::to_string(phi_m));
  }
  if (!(phi_w >= 0.0 && phi_w <= 1.0)) {
    throw ConfigError("phi_w must lie in [0, 1], got " + std::to_string(phi_w));
  }
}

PreferenceProfile::PreferenceProfile(Side side, int num_targets, std::vector<Permutation> rankings)
    : side_(side), num_targets_(num_targets), rankings_(std::move(rankings)) {
  for (const auto& r : rankings_) {
    if (r.size() != num_targets_) {
      throw DimensionMismatch("ranking of length " + std::to_string(r.size()) +
                              " in a profile over " + std::to_string(num_targets_) + " targets");
    }
  }
}

const Permutation& PreferenceProfile::ranking(int agent) const {
  if (agent < 0 || agent >= num_agents()) {
    throw std::out_of_range(std::string("unknown agent ") + std::to_string(agent) + " on side " +
                            to_string(side_));
  }
  return rankings_[static_cast<std::size_t>(agent)];
}

int PreferenceProfile::rank_of(int agent, int target) const {
  const auto& r = ranking(agent);
  if (target < 0 || target >= num_targets_) {
    throw std::out_of_range(std::string("unknown target ") + std::to_string(target) + " for " +
                            to_string(side_));
  }
  return r.rank(target);
}

std::uint64_t agent_seed(std::uint64_t market_seed, Side side, int agent) {
  return derive_seed(derive_seed(market_seed, side_tag(side)), static_cast<std::uint64_t>(agent));
}

MarketInstance generate(const MarketConfig& config, const GenerateOptions& options) {
  config.validate();
  if (static_cast<long long>(config.n) + config.k > options.max_agents_per_side) {
    throw ResourceLimitError("n + k = " + std::to_string(static_cast<long long>(config.n) + config.k) +
                             " exceeds the limit of " +
                             std::to_string(options.max_agents_per_side) + " agents per side");
  }
  MarketInstance inst;
  inst.config = config;
  inst.men = PreferenceProfile(Side::Men, config.num_women(), draw_rankings(config, Side::Men));
  inst.women = PreferenceProfile(Side::Women, config.num_men(), draw_rankings(config, Side::Women));
  return inst;
}

MarketInstance make_instance(const MarketConfig& config,
                             const std::vector<std::vector<int>>& men_lists,
                             const std::vector<std::vector<int>>& women_lists) {
  config.validate();
  MarketInstance inst;
  inst.config = config;
  inst.men = PreferenceProfile(
      Side::Men, config.num_women(),
      lists_to_rankings(men_lists, config.num_men(), config.num_women(), "men"));
  inst.women = PreferenceProfile(
      Side::Women, config.num_men(),
      lists_to_rankings(women_lists, config.num_women(), config.num_men(), "women"));
  return inst;
}

}  // namespace mmarket
