#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mmarket/market.hpp"
#include "mmarket/matching.hpp"

// JSON layouts used for replay and cross-implementation fixtures. All ids on
// the wire are 1-based.
//
// Instance:
//   {"config": {"n": 3, "k": 1, "phi_m": 0.5, "phi_w": 0.5, "seed": 7},
//    "men":   [[2, 1, 4, 3], ...],   // men[i] lists women best first (n + k entries)
//    "women": [[1, 3, 2], ...]}      // women[j] lists men best first (n entries)
//
// Matching:
//   {"man_to_woman": [2, 1, 3], "woman_to_man": [2, 1, 3, null]}
//
// Stable set:
//   {"count": 2, "truncated": false, "man_optimal": 0, "woman_optimal": 1,
//    "matchings": [<matching>, ...]}
namespace mmarket {

std::string instance_to_json(const MarketInstance& instance);
MarketInstance instance_from_json(std::string_view text);

std::string matching_to_json(const Matching& matching);
Matching matching_from_json(std::string_view text);

std::string stable_set_to_json(const StableSet& set);

MarketInstance read_instance_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace mmarket
