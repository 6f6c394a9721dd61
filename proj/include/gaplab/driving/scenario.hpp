#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "gaplab/core/types.hpp"

namespace gaplab {

constexpr int kScenarioSchemaVersion = 1;

/// One recorded driving scene: a static roadgraph plus a 91-step track per
/// agent (10 context states followed by 81 horizon states at 10 Hz).
/// `tracks[ego_index]` is the expert's logged trajectory; every other track
/// replays as-is during simulation.
struct Scenario {
  std::string id;
  std::vector<Polyline> roadgraph;
  std::vector<std::vector<AgentState>> tracks;
  int ego_index = 0;

  /// Structural checks: non-empty id, well-formed polylines with at least
  /// one lane center, exactly 91 states per track, ego_index in range, the
  /// ego track valid at every timestep, finite numbers, positive extents on
  /// valid states. Throws Error naming the scenario id and offending field.
  void validate() const;

  const std::vector<AgentState>& ego_track() const {
    return tracks[static_cast<std::size_t>(ego_index)];
  }

  bool operator==(const Scenario&) const = default;
};

/// Serialization: one scenario per line as a self-describing JSON object
/// {schema_version, id, ego_index, roadgraph, tracks}. Roadgraph entries are
/// {kind, width, points}; track states are fixed 9-slot arrays
/// [x, y, yaw, vx, vy, z, length, width, valid]. Re-serializing a loaded
/// line reproduces it byte for byte.
std::string scenario_to_json_line(const Scenario& s);

/// Parse one line. `where` prefixes error messages (typically "file:line");
/// schema violations report the JSON field path.
Scenario scenario_from_json_line(const std::string& line, const std::string& where);

/// Streaming corpus reader. Malformed lines throw but leave the reader
/// positioned after the bad line, so callers may skip and continue.
class ScenarioReader {
 public:
  explicit ScenarioReader(const std::string& path);

  /// Next scenario, or nullopt at end of input. Blank lines are skipped.
  std::optional<Scenario> next();

  /// 1-based line number of the most recently returned (or failed) record.
  long long line() const { return line_; }

 private:
  std::string path_;
  std::ifstream in_;
  long long line_ = 0;
};

class ScenarioWriter {
 public:
  explicit ScenarioWriter(const std::string& path);
  void write(const Scenario& s);
  long long written() const { return written_; }

 private:
  std::string path_;
  std::ofstream out_;
  long long written_ = 0;
};

/// Whole-corpus convenience wrappers around the streaming classes. Loading
/// throws on the first malformed line.
std::vector<Scenario> load_scenarios(const std::string& path);
void save_scenarios(const std::vector<Scenario>& corpus, const std::string& path);

}  // namespace gaplab
