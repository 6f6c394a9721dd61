#include "gaplab/core/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "gaplab/common/error.hpp"

namespace gaplab {

namespace {

struct Vec2 {
  double x, y;
};

std::array<Vec2, 4> box_corners(const AgentState& s) {
  const double c = std::cos(s.pose.yaw);
  const double sn = std::sin(s.pose.yaw);
  const double hl = 0.5 * s.length;
  const double hw = 0.5 * s.width;
  std::array<Vec2, 4> out;
  const std::array<std::pair<double, double>, 4> local = {
      {{hl, hw}, {hl, -hw}, {-hl, -hw}, {-hl, hw}}};
  for (int i = 0; i < 4; ++i) {
    out[static_cast<std::size_t>(i)] = {s.pose.x + c * local[i].first - sn * local[i].second,
                                        s.pose.y + sn * local[i].first + c * local[i].second};
  }
  return out;
}

void check_box(const AgentState& s, const char* who) {
  require(std::isfinite(s.pose.x) && std::isfinite(s.pose.y) && std::isfinite(s.pose.yaw),
          std::string(who) + ": non-finite pose");
  require(s.length > 0.0 && s.width > 0.0, std::string(who) + ": non-positive extents");
}

}  // namespace

bool boxes_overlap(const AgentState& a, const AgentState& b) {
  check_box(a, "boxes_overlap");
  check_box(b, "boxes_overlap");

  const auto ca = box_corners(a);
  const auto cb = box_corners(b);
  // Candidate separating axes: the two edge normals of each rectangle.
  const std::array<Vec2, 4> axes = {
      Vec2{std::cos(a.pose.yaw), std::sin(a.pose.yaw)},
      Vec2{-std::sin(a.pose.yaw), std::cos(a.pose.yaw)},
      Vec2{std::cos(b.pose.yaw), std::sin(b.pose.yaw)},
      Vec2{-std::sin(b.pose.yaw), std::cos(b.pose.yaw)},
  };
  for (const Vec2& ax : axes) {
    double amin = std::numeric_limits<double>::infinity(), amax = -amin;
    double bmin = amin, bmax = amax;
    for (const Vec2& p : ca) {
      const double d = p.x * ax.x + p.y * ax.y;
      amin = std::min(amin, d);
      amax = std::max(amax, d);
    }
    for (const Vec2& p : cb) {
      const double d = p.x * ax.x + p.y * ax.y;
      bmin = std::min(bmin, d);
      bmax = std::max(bmax, d);
    }
    if (amax < bmin || bmax < amin) return false;
  }
  return true;
}

PolylineDistance point_to_polyline_distance(double px, double py, const Polyline& line) {
  require(line.points.size() >= 2, "point_to_polyline_distance: polyline needs >= 2 points");
  PolylineDistance best;
  best.distance = std::numeric_limits<double>::infinity();
  best.segment_index = 0;
  for (std::size_t i = 0; i + 1 < line.points.size(); ++i) {
    const auto [ax, ay] = line.points[i];
    const auto [bx, by] = line.points[i + 1];
    const double ex = bx - ax;
    const double ey = by - ay;
    const double len2 = ex * ex + ey * ey;
    double t = len2 > 0.0 ? ((px - ax) * ex + (py - ay) * ey) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double qx = ax + t * ex;
    const double qy = ay + t * ey;
    const double d = std::hypot(px - qx, py - qy);
    if (d < best.distance) {
      best.distance = d;
      best.segment_index = static_cast<int>(i);
    }
  }
  return best;
}

bool is_offroad(const AgentState& state, const std::vector<Polyline>& roadgraph) {
  require(!roadgraph.empty(), "is_offroad: empty roadgraph");
  double best = std::numeric_limits<double>::infinity();
  double best_width = 0.0;
  bool found = false;
  for (const Polyline& line : roadgraph) {
    if (line.kind != PolylineKind::kLaneCenter) continue;
    const PolylineDistance d = point_to_polyline_distance(state.pose.x, state.pose.y, line);
    if (d.distance < best) {
      best = d.distance;
      best_width = line.width;
      found = true;
    }
  }
  require(found, "is_offroad: roadgraph has no lane-center polyline");
  return best > best_width;
}

double log_divergence(const Pose2D& sim, const Pose2D& logged) {
  require(std::isfinite(sim.x) && std::isfinite(sim.y) && std::isfinite(logged.x) &&
              std::isfinite(logged.y),
          "log_divergence: non-finite pose");
  return std::hypot(sim.x - logged.x, sim.y - logged.y);
}

std::vector<RoadPoint> sample_roadgraph(const std::vector<Polyline>& roadgraph, double spacing) {
  require(spacing > 0.0, "sample_roadgraph: spacing must be positive");
  std::vector<RoadPoint> out;
  for (const Polyline& line : roadgraph) {
    double carry = 0.0;  // distance already covered toward the next sample
    for (std::size_t i = 0; i + 1 < line.points.size(); ++i) {
      const auto [ax, ay] = line.points[i];
      const auto [bx, by] = line.points[i + 1];
      const double seg = std::hypot(bx - ax, by - ay);
      if (i == 0) out.push_back({ax, ay, line.kind});
      double s = spacing - carry;
      while (s <= seg) {
        const double t = s / seg;
        out.push_back({ax + t * (bx - ax), ay + t * (by - ay), line.kind});
        s += spacing;
      }
      carry = seg - (s - spacing);
    }
  }
  return out;
}

StepMetrics step_metrics(const std::vector<AgentState>& agents, int ego_index,
                         const std::vector<Polyline>& roadgraph, const Pose2D& logged_ego) {
  require(ego_index >= 0 && ego_index < static_cast<int>(agents.size()),
          "step_metrics: ego index out of range");
  const AgentState& ego = agents[static_cast<std::size_t>(ego_index)];
  StepMetrics m;
  if (!ego.valid) return m;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (static_cast<int>(i) == ego_index || !agents[i].valid) continue;
    if (boxes_overlap(ego, agents[i])) {
      m.overlap = true;
      break;
    }
  }
  m.offroad = is_offroad(ego, roadgraph);
  m.log_divergence = log_divergence(ego.pose, logged_ego);
  return m;
}

Pose2D transform_pose(const Pose2D& p, double rot, double tx, double ty) {
  const double c = std::cos(rot);
  const double s = std::sin(rot);
  return Pose2D::make(c * p.x - s * p.y + tx, s * p.x + c * p.y + ty, p.yaw + rot);
}

AgentState transform_state(const AgentState& st, double rot, double tx, double ty) {
  AgentState out = st;
  out.pose = transform_pose(st.pose, rot, tx, ty);
  const double c = std::cos(rot);
  const double s = std::sin(rot);
  out.vx = c * st.vx - s * st.vy;
  out.vy = s * st.vx + c * st.vy;
  return out;
}

Polyline transform_polyline(const Polyline& line, double rot, double tx, double ty) {
  Polyline out = line;
  const double c = std::cos(rot);
  const double s = std::sin(rot);
  for (auto& [x, y] : out.points) {
    const double nx = c * x - s * y + tx;
    const double ny = s * x + c * y + ty;
    x = nx;
    y = ny;
  }
  return out;
}

}  // namespace gaplab
