#include "gaplab/core/kinematics.hpp"

#include <cmath>

#include "gaplab/common/error.hpp"

namespace gaplab {

std::string to_string(PolylineKind k) {
  switch (k) {
    case PolylineKind::kLaneCenter: return "lane-center";
    case PolylineKind::kRoadEdge: return "road-edge";
    case PolylineKind::kOther: return "other";
  }
  return "other";
}

PolylineKind polyline_kind_from_string(const std::string& s) {
  if (s == "lane-center") return PolylineKind::kLaneCenter;
  if (s == "road-edge") return PolylineKind::kRoadEdge;
  if (s == "other") return PolylineKind::kOther;
  throw Error("unknown polyline kind: " + s);
}

namespace {

void check_state(const AgentState& s, const char* who) {
  require(std::isfinite(s.pose.x) && std::isfinite(s.pose.y) && std::isfinite(s.pose.yaw),
          std::string(who) + ": non-finite pose");
  require(std::isfinite(s.vx) && std::isfinite(s.vy), std::string(who) + ": non-finite velocity");
  require(s.length > 0.0 && s.width > 0.0, std::string(who) + ": non-positive extents");
}

}  // namespace

AgentState step_delta(const AgentState& state, const DeltaAction& action, double dt) {
  check_state(state, "step_delta");
  require(action.finite(), "step_delta: non-finite action");
  require(dt > 0.0, "step_delta: dt must be positive");

  AgentState next = state;
  next.pose.x = state.pose.x + action.dx;
  next.pose.y = state.pose.y + action.dy;
  next.pose.yaw = wrap_angle(state.pose.yaw + action.dtheta);
  next.vx = action.dx / dt;
  next.vy = action.dy / dt;
  return next;
}

DeltaAction inverse_kinematics(const AgentState& prev, const AgentState& next, double dt) {
  check_state(prev, "inverse_kinematics");
  check_state(next, "inverse_kinematics");
  require(dt > 0.0, "inverse_kinematics: dt must be positive");

  DeltaAction a;
  a.dx = next.pose.x - prev.pose.x;
  a.dy = next.pose.y - prev.pose.y;
  a.dtheta = wrap_angle(next.pose.yaw - prev.pose.yaw);
  return a;
}

DeltaAction delta_world_to_local(const DeltaAction& world, double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * world.dx + s * world.dy, -s * world.dx + c * world.dy, world.dtheta};
}

DeltaAction delta_local_to_world(const DeltaAction& local, double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * local.dx - s * local.dy, s * local.dx + c * local.dy, local.dtheta};
}

}  // namespace gaplab
