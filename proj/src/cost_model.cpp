#include "thetajoin/cost_model.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace thetajoin {

using nlohmann::json;

Profile default_profile(std::uint64_t map_slots) {
  Profile p;
  p.c1 = 0.01 / kMiB;
  p.c2 = 0.02 / kMiB;
  p.p = PiecewiseLinear<double>::flat(0.005 / kMiB);
  p.q = PiecewiseLinear<double>::flat(0.01);
  p.block_size = 64ull << 20;
  p.map_slots = std::max<std::uint64_t>(1, map_slots);
  p.merge_c = p.c1;
  p.label = "synthetic defaults";
  p.validate();
  return p;
}

namespace {

json table_json(const PiecewiseLinear<double>& t) {
  json out = json::array();
  for (const auto& [x, y] : t.knots()) out.push_back({x, y});
  return out;
}

PiecewiseLinear<double> table_from(const json& j, const char* name) {
  if (!j.is_array()) throw ParameterError(std::string("profile: '") + name + "' must be an array of [x, y] pairs");
  std::vector<std::pair<double, double>> knots;
  for (const auto& k : j) {
    if (!k.is_array() || k.size() != 2) throw ParameterError(std::string("profile: bad knot in '") + name + "'");
    knots.emplace_back(k[0].get<double>(), k[1].get<double>());
  }
  return PiecewiseLinear<double>(std::move(knots));
}

}  // namespace

std::string profile_to_json(const Profile& p) {
  json j;
  j["label"] = p.label;
  j["low_confidence"] = p.low_confidence;
  j["c1"] = p.c1;
  j["c2"] = p.c2;
  j["p_table"] = table_json(p.p);
  j["q_table"] = table_json(p.q);
  j["block_size"] = p.block_size;
  j["map_slots"] = p.map_slots;
  j["merge_c"] = p.merge_c;
  return j.dump(2) + "\n";
}

Profile profile_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("profile: ") + e.what());
  }
  Profile p;
  try {
    p.c1 = j.at("c1").get<double>();
    p.c2 = j.at("c2").get<double>();
    p.p = table_from(j.at("p_table"), "p_table");
    p.q = table_from(j.at("q_table"), "q_table");
    p.block_size = j.at("block_size").get<std::uint64_t>();
    p.map_slots = j.value("map_slots", std::uint64_t{1});
    p.merge_c = j.value("merge_c", p.c1);
    p.label = j.value("label", std::string());
    p.low_confidence = j.value("low_confidence", false);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("profile: ") + e.what());
  }
  p.validate();
  return p;
}

Profile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open calibration profile " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return profile_from_json(ss.str());
}

void save_profile(const Profile& profile, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write calibration profile " + path.string());
  out << profile_to_json(profile);
  if (!out) throw Error("failed writing calibration profile " + path.string());
}

}  // namespace thetajoin
