#include "gaplab/driving/scenario.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "json.hpp"

#include "gaplab/common/error.hpp"

namespace gaplab {
namespace {

using Json = nlohmann::ordered_json;

bool all_finite(const AgentState& s) {
  return std::isfinite(s.pose.x) && std::isfinite(s.pose.y) && std::isfinite(s.pose.yaw) &&
         std::isfinite(s.vx) && std::isfinite(s.vy) && std::isfinite(s.z) &&
         std::isfinite(s.length) && std::isfinite(s.width);
}

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw Error(where + ": " + msg);
}

const Json& member(const Json& obj, const char* key, const std::string& where,
                   const std::string& path) {
  if (!obj.is_object()) fail(where, path + " must be an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, path + " is missing field '" + key + "'");
  return *it;
}

double number_at(const Json& v, const std::string& where, const std::string& path) {
  if (!v.is_number()) fail(where, path + " must be a number");
  return v.get<double>();
}

int int_at(const Json& v, const std::string& where, const std::string& path) {
  if (!v.is_number_integer()) fail(where, path + " must be an integer");
  return v.get<int>();
}

}  // namespace

void Scenario::validate() const {
  const std::string where = "scenario '" + id + "'";
  require(!id.empty(), "scenario with empty id");
  require(!roadgraph.empty(), where + ": roadgraph is empty");
  bool has_lane = false;
  for (std::size_t i = 0; i < roadgraph.size(); ++i) {
    const Polyline& line = roadgraph[i];
    const std::string path = where + ": roadgraph[" + std::to_string(i) + "]";
    require(line.points.size() >= 2, path + " needs at least 2 points");
    require(std::isfinite(line.width) && line.width >= 0.0, path + " has a bad width");
    for (std::size_t p = 0; p < line.points.size(); ++p) {
      require(std::isfinite(line.points[p].first) && std::isfinite(line.points[p].second),
              path + " has a non-finite point");
      if (p > 0) {
        require(line.points[p] != line.points[p - 1],
                path + " repeats point " + std::to_string(p - 1));
      }
    }
    if (line.kind == PolylineKind::kLaneCenter) {
      require(line.width > 0.0, path + " lane center needs width > 0");
      has_lane = true;
    }
  }
  require(has_lane, where + ": no lane-center polyline");

  require(!tracks.empty(), where + ": no tracks");
  require(ego_index >= 0 && ego_index < static_cast<int>(tracks.size()),
          where + ": ego_index " + std::to_string(ego_index) + " out of range");
  for (std::size_t a = 0; a < tracks.size(); ++a) {
    const std::string path = where + ": tracks[" + std::to_string(a) + "]";
    require(tracks[a].size() == static_cast<std::size_t>(kScenarioSteps),
            path + " has " + std::to_string(tracks[a].size()) + " states, expected " +
                std::to_string(kScenarioSteps));
    for (std::size_t t = 0; t < tracks[a].size(); ++t) {
      const AgentState& s = tracks[a][t];
      const std::string sp = path + "[" + std::to_string(t) + "]";
      require(all_finite(s), sp + " has a non-finite value");
      if (s.valid) {
        require(s.length > 0.0 && s.width > 0.0, sp + " needs positive extents");
      }
      if (static_cast<int>(a) == ego_index) {
        require(s.valid, sp + " (ego) must be valid");
      }
    }
  }
}

std::string scenario_to_json_line(const Scenario& s) {
  Json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["id"] = s.id;
  j["ego_index"] = s.ego_index;
  Json road = Json::array();
  for (const Polyline& line : s.roadgraph) {
    Json entry;
    entry["kind"] = to_string(line.kind);
    entry["width"] = line.width;
    Json pts = Json::array();
    for (const auto& [x, y] : line.points) pts.push_back(Json::array({x, y}));
    entry["points"] = std::move(pts);
    road.push_back(std::move(entry));
  }
  j["roadgraph"] = std::move(road);
  Json tracks = Json::array();
  for (const auto& track : s.tracks) {
    Json states = Json::array();
    for (const AgentState& st : track) {
      states.push_back(Json::array({st.pose.x, st.pose.y, st.pose.yaw, st.vx, st.vy, st.z,
                                    st.length, st.width, st.valid ? 1 : 0}));
    }
    tracks.push_back(std::move(states));
  }
  j["tracks"] = std::move(tracks);
  return j.dump();
}

Scenario scenario_from_json_line(const std::string& line, const std::string& where) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const std::exception& e) {
    fail(where, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(where, "scenario line must be a JSON object");

  const int version = int_at(member(j, "schema_version", where, "scenario"), where,
                             "schema_version");
  if (version != kScenarioSchemaVersion) {
    fail(where, "schema_version " + std::to_string(version) + " unsupported, expected " +
                    std::to_string(kScenarioSchemaVersion));
  }

  Scenario s;
  const Json& jid = member(j, "id", where, "scenario");
  if (!jid.is_string()) fail(where, "id must be a string");
  s.id = jid.get<std::string>();
  s.ego_index = int_at(member(j, "ego_index", where, "scenario"), where, "ego_index");

  const Json& road = member(j, "roadgraph", where, "scenario");
  if (!road.is_array()) fail(where, "roadgraph must be an array");
  for (std::size_t i = 0; i < road.size(); ++i) {
    const std::string path = "roadgraph[" + std::to_string(i) + "]";
    const Json& entry = road[i];
    Polyline line;
    const Json& kind = member(entry, "kind", where, path);
    if (!kind.is_string()) fail(where, path + ".kind must be a string");
    try {
      line.kind = polyline_kind_from_string(kind.get<std::string>());
    } catch (const Error& e) {
      fail(where, path + ".kind: " + e.what());
    }
    line.width = number_at(member(entry, "width", where, path), where, path + ".width");
    const Json& pts = member(entry, "points", where, path);
    if (!pts.is_array()) fail(where, path + ".points must be an array");
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const std::string pp = path + ".points[" + std::to_string(p) + "]";
      if (!pts[p].is_array() || pts[p].size() != 2) fail(where, pp + " must be [x, y]");
      line.points.emplace_back(number_at(pts[p][0], where, pp + "[0]"),
                               number_at(pts[p][1], where, pp + "[1]"));
    }
    s.roadgraph.push_back(std::move(line));
  }

  const Json& tracks = member(j, "tracks", where, "scenario");
  if (!tracks.is_array()) fail(where, "tracks must be an array");
  for (std::size_t a = 0; a < tracks.size(); ++a) {
    const std::string path = "tracks[" + std::to_string(a) + "]";
    const Json& jtrack = tracks[a];
    if (!jtrack.is_array()) fail(where, path + " must be an array");
    if (jtrack.size() != static_cast<std::size_t>(kScenarioSteps)) {
      fail(where, path + " has " + std::to_string(jtrack.size()) + " states, expected " +
                      std::to_string(kScenarioSteps));
    }
    std::vector<AgentState> track;
    track.reserve(jtrack.size());
    for (std::size_t t = 0; t < jtrack.size(); ++t) {
      const std::string sp = path + "[" + std::to_string(t) + "]";
      const Json& e = jtrack[t];
      if (!e.is_array() || e.size() != 9) {
        fail(where, sp + " must be [x, y, yaw, vx, vy, z, length, width, valid]");
      }
      AgentState st;
      st.pose.x = number_at(e[0], where, sp + "[0]");
      st.pose.y = number_at(e[1], where, sp + "[1]");
      st.pose.yaw = number_at(e[2], where, sp + "[2]");
      st.vx = number_at(e[3], where, sp + "[3]");
      st.vy = number_at(e[4], where, sp + "[4]");
      st.z = number_at(e[5], where, sp + "[5]");
      st.length = number_at(e[6], where, sp + "[6]");
      st.width = number_at(e[7], where, sp + "[7]");
      const int valid = int_at(e[8], where, sp + "[8]");
      if (valid != 0 && valid != 1) fail(where, sp + "[8] (valid) must be 0 or 1");
      st.valid = valid == 1;
      track.push_back(st);
    }
    s.tracks.push_back(std::move(track));
  }

  try {
    s.validate();
  } catch (const Error& e) {
    fail(where, e.what());
  }
  return s;
}

ScenarioReader::ScenarioReader(const std::string& path) : path_(path), in_(path) {
  require(in_.good(), "cannot open scenario file: " + path);
}

std::optional<Scenario> ScenarioReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.empty()) continue;
    return scenario_from_json_line(line, path_ + ":" + std::to_string(line_));
  }
  return std::nullopt;
}

ScenarioWriter::ScenarioWriter(const std::string& path) : path_(path), out_(path) {
  require(out_.good(), "cannot open scenario file for writing: " + path);
}

void ScenarioWriter::write(const Scenario& s) {
  out_ << scenario_to_json_line(s) << '\n';
  require(out_.good(), "write failed: " + path_);
  ++written_;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
  ScenarioReader reader(path);
  std::vector<Scenario> corpus;
  while (auto s = reader.next()) corpus.push_back(std::move(*s));
  return corpus;
}

void save_scenarios(const std::vector<Scenario>& corpus, const std::string& path) {
  ScenarioWriter writer(path);
  for (const Scenario& s : corpus) writer.write(s);
}

}  // namespace gaplab
