#include "gaplab/driving/filters.hpp"

#include <cmath>
#include <optional>

#include "gaplab/common/error.hpp"
#include "gaplab/core/geometry.hpp"

namespace gaplab {
namespace {

/// Half-diagonals of every state of a track, for cheap overlap pre-checks.
std::vector<double> half_diagonals(const std::vector<AgentState>& track) {
  std::vector<double> out;
  out.reserve(track.size());
  for (const AgentState& s : track) out.push_back(0.5 * std::hypot(s.length, s.width));
  return out;
}

bool tracks_cross(const std::vector<AgentState>& ego, const std::vector<double>& ego_diag,
                  const std::vector<AgentState>& other) {
  const std::vector<double> other_diag = half_diagonals(other);
  for (std::size_t i = 0; i < ego.size(); ++i) {
    if (!ego[i].valid) continue;
    for (std::size_t j = 0; j < other.size(); ++j) {
      if (!other[j].valid) continue;
      const double dx = ego[i].pose.x - other[j].pose.x;
      const double dy = ego[i].pose.y - other[j].pose.y;
      const double reach = ego_diag[i] + other_diag[j];
      if (dx * dx + dy * dy > reach * reach) continue;
      if (boxes_overlap(ego[i], other[j])) return true;
    }
  }
  return false;
}

}  // namespace

bool scenario_interactive(const Scenario& s) {
  const auto& ego = s.ego_track();
  const std::vector<double> ego_diag = half_diagonals(ego);
  for (std::size_t a = 0; a < s.tracks.size(); ++a) {
    if (static_cast<int>(a) == s.ego_index) continue;
    if (tracks_cross(ego, ego_diag, s.tracks[a])) return true;
  }
  return false;
}

double ego_mean_speed(const Scenario& s) {
  const auto& ego = s.ego_track();
  double acc = 0.0;
  int n = 0;
  for (std::size_t t = 1; t < ego.size(); ++t) {
    if (!ego[t - 1].valid || !ego[t].valid) continue;
    acc += std::hypot(ego[t].pose.x - ego[t - 1].pose.x,
                      ego[t].pose.y - ego[t - 1].pose.y) / kDt;
    ++n;
  }
  return n > 0 ? acc / n : 0.0;
}

std::vector<Scenario> filter_interactive(const std::vector<Scenario>& in) {
  std::vector<Scenario> out;
  for (const Scenario& s : in) {
    if (scenario_interactive(s)) out.push_back(s);
  }
  return out;
}

std::vector<Scenario> filter_speed(const std::vector<Scenario>& in, double min_mean_speed) {
  std::vector<Scenario> out;
  for (const Scenario& s : in) {
    if (ego_mean_speed(s) >= min_mean_speed) out.push_back(s);
  }
  return out;
}

FilterReport filter_corpus(const std::string& in_path, const std::string& out_path,
                           bool require_interactive, double min_mean_speed) {
  ScenarioReader reader(in_path);
  ScenarioWriter writer(out_path);
  FilterReport report;
  for (;;) {
    std::optional<Scenario> s;
    try {
      s = reader.next();
    } catch (const Error&) {
      ++report.read;
      ++report.malformed;
      continue;
    }
    if (!s) break;
    ++report.read;
    if (require_interactive && !scenario_interactive(*s)) {
      ++report.dropped_noninteractive;
      continue;
    }
    if (ego_mean_speed(*s) < min_mean_speed) {
      ++report.dropped_slow;
      continue;
    }
    writer.write(*s);
    ++report.kept;
  }
  return report;
}

}  // namespace gaplab
