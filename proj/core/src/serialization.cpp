#include "mmarket/serialization.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mmarket/errors.hpp"

namespace mmarket {
namespace {

using nlohmann::json;

json lists_to_json(const PreferenceProfile& profile) {
  json out = json::array();
  for (const auto& ranking : profile.rankings()) {
    json list = json::array();
    for (int target : ranking.order()) list.push_back(target + 1);
    out.push_back(std::move(list));
  }
  return out;
}

std::vector<std::vector<int>> lists_from_json(const json& j, const char* field) {
  if (!j.is_array()) throw ConfigError(std::string("instance field '") + field + "' must be an array");
  std::vector<std::vector<int>> out;
  for (const auto& row : j) {
    std::vector<int> list;
    for (const auto& id : row) list.push_back(id.get<int>() - 1);
    out.push_back(std::move(list));
  }
  return out;
}

json matching_json(const Matching& matching) {
  json men = json::array();
  for (int w : matching.man_to_woman) men.push_back(w == kUnmatched ? json(nullptr) : json(w + 1));
  json women = json::array();
  for (int m : matching.woman_to_man) women.push_back(m == kUnmatched ? json(nullptr) : json(m + 1));
  return json{{"man_to_woman", std::move(men)}, {"woman_to_man", std::move(women)}};
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(std::string("unknown field '") + key + "' in " + where);
  }
}

}  // namespace

std::string instance_to_json(const MarketInstance& instance) {
  const auto& c = instance.config;
  json j;
  j["config"] = json{{"n", c.n}, {"k", c.k}, {"phi_m", c.phi_m}, {"phi_w", c.phi_w}, {"seed", c.seed}};
  j["men"] = lists_to_json(instance.men);
  j["women"] = lists_to_json(instance.women);
  return j.dump();
}

MarketInstance instance_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("instance is not valid JSON: ") + e.what());
  }
  try {
    reject_unknown(j, {"config", "men", "women"}, "instance");
    const auto& c = j.at("config");
    reject_unknown(c, {"n", "k", "phi_m", "phi_w", "seed"}, "instance config");
    MarketConfig config;
    config.n = c.at("n").get<int>();
    config.k = c.value("k", 0);
    config.phi_m = c.value("phi_m", 1.0);
    config.phi_w = c.value("phi_w", 1.0);
    config.seed = c.value("seed", std::uint64_t{0});
    return make_instance(config, lists_from_json(j.at("men"), "men"),
                         lists_from_json(j.at("women"), "women"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed instance: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("malformed instance: ") + e.what());
  }
}

std::string matching_to_json(const Matching& matching) { return matching_json(matching).dump(); }

Matching matching_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    Matching out;
    for (const auto& w : j.at("man_to_woman")) out.man_to_woman.push_back(w.is_null() ? kUnmatched : w.get<int>() - 1);
    for (const auto& m : j.at("woman_to_man")) out.woman_to_man.push_back(m.is_null() ? kUnmatched : m.get<int>() - 1);
    reject_unknown(j, {"man_to_woman", "woman_to_man"}, "matching");
    if (!out.is_consistent()) throw ConfigError("matching is not a consistent partial bijection");
    return out;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed matching: ") + e.what());
  }
}

std::string stable_set_to_json(const StableSet& set) {
  json matchings = json::array();
  for (const auto& mu : set.matchings) matchings.push_back(matching_json(mu));
  json j{{"count", set.matchings.size()},
         {"truncated", set.truncated},
         {"man_optimal", set.man_optimal},
         {"woman_optimal", set.woman_optimal},
         {"matchings", std::move(matchings)}};
  return j.dump();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

MarketInstance read_instance_file(const std::filesystem::path& path) {
  return instance_from_json(read_text_file(path));
}

}  // namespace mmarket
