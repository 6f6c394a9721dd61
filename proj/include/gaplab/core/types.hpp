#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace gaplab {

/// Simulation runs at the source-data cadence: 10 Hz, 91 states per scenario
/// (10 context + 81 horizon).
constexpr double kDt = 0.1;
constexpr int kScenarioSteps = 91;
constexpr int kContextSteps = 10;
constexpr int kHorizonSteps = kScenarioSteps - kContextSteps;  // 81

constexpr double kPi = 3.14159265358979323846;

/// Wrap an angle to [-pi, pi).
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

struct Pose2D {
  double x = 0.0;    // meters
  double y = 0.0;    // meters
  double yaw = 0.0;  // radians, stored in [-pi, pi)

  static Pose2D make(double x, double y, double yaw) { return {x, y, wrap_angle(yaw)}; }

  bool operator==(const Pose2D&) const = default;
};

/// One scene object at one timestep: pose, world-frame velocity, bounding box
/// extents. z is carried through from the source data but takes no part in
/// the 2D dynamics.
struct AgentState {
  Pose2D pose;
  double vx = 0.0;      // m/s, world frame
  double vy = 0.0;      // m/s, world frame
  double z = 0.0;       // meters, unused by dynamics
  double length = 4.5;  // meters, > 0
  double width = 2.0;   // meters, > 0
  bool valid = true;

  double speed() const { return std::hypot(vx, vy); }

  bool operator==(const AgentState&) const = default;
};

/// Per-step pose displacement control (world frame).
struct DeltaAction {
  double dx = 0.0;      // meters
  double dy = 0.0;      // meters
  double dtheta = 0.0;  // radians

  bool finite() const {
    return std::isfinite(dx) && std::isfinite(dy) && std::isfinite(dtheta);
  }
};

enum class PolylineKind : std::uint8_t { kLaneCenter = 0, kRoadEdge = 1, kOther = 2 };

std::string to_string(PolylineKind k);
PolylineKind polyline_kind_from_string(const std::string& s);

struct Polyline {
  PolylineKind kind = PolylineKind::kLaneCenter;
  std::vector<std::pair<double, double>> points;  // >= 2, consecutive points distinct
  double width = 0.0;  // drivable half-width, meaningful for lane centers

  bool operator==(const Polyline&) const = default;
};

/// Roadgraph resampled to evenly spaced points for observations.
struct RoadPoint {
  double x = 0.0;
  double y = 0.0;
  PolylineKind kind = PolylineKind::kLaneCenter;
};

struct StepMetrics {
  bool overlap = false;
  bool offroad = false;
  double log_divergence = 0.0;  // meters, >= 0
};

}  // namespace gaplab
