#include "gaplab/driving/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "gaplab/common/error.hpp"
#include "gaplab/core/geometry.hpp"
#include "gaplab/driving/sim.hpp"

namespace gaplab {
namespace {

constexpr double kAccel = 3.0;      // m/s^2, speed tracking limit
constexpr double kBrake = 2.5;      // m/s^2, braking-curve deceleration
constexpr double kYawRate = 2.5;    // rad/s, steering limit
constexpr double kMinGap = 4.0;     // bumper gap the follower rule converges to, m
constexpr double kSpawnGap = 12.0;  // same-lane spawn spacing, m
constexpr double kInf = std::numeric_limits<double>::infinity();

/// Arc-length-parameterized centerline an agent tracks. Paths extend past
/// the mapped corridor so lookahead points stay defined near the end.
struct LanePath {
  std::vector<std::pair<double, double>> pts;
  std::vector<double> cum;

  void finish() {
    cum.assign(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      cum[i] = cum[i - 1] + std::hypot(pts[i].first - pts[i - 1].first,
                                       pts[i].second - pts[i - 1].second);
    }
  }

  double length() const { return cum.back(); }

  int segment_at(double s) const {
    int lo = 0;
    int hi = static_cast<int>(cum.size()) - 1;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      if (cum[static_cast<std::size_t>(mid)] <= s) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

  std::pair<double, double> point_at(double s) const {
    s = std::clamp(s, 0.0, length());
    const int i = segment_at(s);
    const auto& a = pts[static_cast<std::size_t>(i)];
    const auto& b = pts[static_cast<std::size_t>(i + 1)];
    const double seg = cum[static_cast<std::size_t>(i + 1)] - cum[static_cast<std::size_t>(i)];
    const double f = seg > 0.0 ? (s - cum[static_cast<std::size_t>(i)]) / seg : 0.0;
    return {a.first + f * (b.first - a.first), a.second + f * (b.second - a.second)};
  }

  double heading_at(double s) const {
    s = std::clamp(s, 0.0, length());
    const int i = segment_at(s);
    const auto& a = pts[static_cast<std::size_t>(i)];
    const auto& b = pts[static_cast<std::size_t>(i + 1)];
    return std::atan2(b.second - a.second, b.first - a.first);
  }

  double project(double x, double y) const {
    double best_d2 = kInf;
    double best_s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double ax = pts[i].first, ay = pts[i].second;
      const double bx = pts[i + 1].first, by = pts[i + 1].second;
      const double dx = bx - ax, dy = by - ay;
      const double len2 = dx * dx + dy * dy;
      double f = len2 > 0.0 ? ((x - ax) * dx + (y - ay) * dy) / len2 : 0.0;
      f = std::clamp(f, 0.0, 1.0);
      const double px = ax + f * dx, py = ay + f * dy;
      const double d2 = (x - px) * (x - px) + (y - py) * (y - py);
      if (d2 < best_d2) {
        best_d2 = d2;
        best_s = cum[i] + f * std::sqrt(len2);
      }
    }
    return best_s;
  }
};

struct AgentPlan {
  int path = 0;
  double s0 = 0.0;
  double lat0 = 0.0;
  double yaw0 = 0.0;
  double cruise = 5.0;
  double length = 4.5;
  double width = 2.0;
  double stop_s = kInf;      // brake-to-stop line along the path
  double stop_until = 0.0;   // seconds; the stop line lifts at this time
  bool parked = false;       // shoulder car: never moves, never acts as a leader
};

struct Layout {
  std::vector<Polyline> roadgraph;
  std::vector<LanePath> paths;
  std::vector<AgentPlan> plans;  // plans[0] is the ego
};

void draw_dims(AgentPlan& plan, Rng& rng) {
  plan.length = std::round(rng.uniform(4.0, 5.0) * 1e3) / 1e3;
  plan.width = std::round(rng.uniform(1.8, 2.1) * 1e3) / 1e3;
}

bool spawn_fits(const Layout& lay, int path, double s0) {
  for (const AgentPlan& p : lay.plans) {
    if (p.path == path && std::fabs(p.s0 - s0) < kSpawnGap) return false;
  }
  return true;
}

LanePath straight_path(double x0, double y0, double x1, double y1) {
  LanePath p;
  p.pts = {{x0, y0}, {x1, y1}};
  p.finish();
  return p;
}

Polyline lane_polyline(const std::vector<std::pair<double, double>>& pts, double half_width) {
  Polyline line;
  line.kind = PolylineKind::kLaneCenter;
  line.points = pts;
  line.width = half_width;
  return line;
}

Polyline edge_polyline(const std::vector<std::pair<double, double>>& pts) {
  Polyline line;
  line.kind = PolylineKind::kRoadEdge;
  line.points = pts;
  return line;
}

std::vector<std::pair<double, double>> arc_points(double cx, double cy, double radius,
                                                  double sign, double span, double step) {
  // sign +1: counterclockwise from the bottom of the circle (left turn);
  // sign -1: clockwise from the top (right turn). Both start heading +x.
  std::vector<std::pair<double, double>> pts;
  const int n = std::max(2, static_cast<int>(std::ceil(span * radius / step)));
  for (int i = 0; i <= n; ++i) {
    const double th = span * i / n;
    pts.emplace_back(cx + radius * std::sin(th), cy - sign * radius * std::cos(th));
  }
  return pts;
}

/// Background traffic for corridor families: an optional slower leader ahead
/// of the ego, then followers and adjacent-lane agents up to the drawn count.
void fill_corridor_traffic(Layout& lay, const GeneratorConfig& cfg, int count,
                           const std::vector<int>& lanes, Rng& rng) {
  const AgentPlan& ego = lay.plans[0];
  int placed = 0;
  if (placed < count && rng.bernoulli(0.75)) {
    AgentPlan p;
    p.path = ego.path;
    p.s0 = ego.s0 + rng.uniform(15.0, 45.0);
    p.cruise = ego.cruise * rng.uniform(0.55, 0.95);
    draw_dims(p, rng);
    lay.plans.push_back(p);
    ++placed;
  }
  int tries = 0;
  while (placed < count && tries < 50) {
    ++tries;
    AgentPlan p;
    p.path = lanes[rng.uniform_index(lanes.size())];
    if (p.path == ego.path) {
      p.s0 = ego.s0 - rng.uniform(15.0, 40.0);
      if (p.s0 < 2.0) continue;
      p.cruise = ego.cruise * rng.uniform(0.8, 1.2);
    } else {
      p.s0 = rng.uniform(5.0, lay.paths[static_cast<std::size_t>(p.path)].length() - 90.0);
      p.cruise = rng.uniform(cfg.speed_min, cfg.speed_max);
    }
    if (!spawn_fits(lay, p.path, p.s0)) continue;
    draw_dims(p, rng);
    lay.plans.push_back(p);
    ++placed;
  }
}

Layout straight_layout(const GeneratorConfig& cfg, Rng& rng) {
  Layout lay;
  const double w = cfg.lane_width;
  const double hw = 0.5 * w;

  lay.paths.push_back(straight_path(-80.0, 0.0, 160.0, 0.0));
  lay.roadgraph.push_back(lane_polyline({{-80.0, 0.0}, {80.0, 0.0}}, hw));
  std::vector<int> lanes = {0};
  double top = hw;
  if (rng.bernoulli(0.8)) {
    const bool oncoming = rng.bernoulli(0.5);
    if (oncoming) {
      lay.paths.push_back(straight_path(80.0, w, -160.0, w));
    } else {
      lay.paths.push_back(straight_path(-80.0, w, 160.0, w));
    }
    lay.roadgraph.push_back(lane_polyline({{-80.0, w}, {80.0, w}}, hw));
    lanes.push_back(1);
    top = w + hw;
  }
  lay.roadgraph.push_back(edge_polyline({{-80.0, -hw}, {80.0, -hw}}));
  lay.roadgraph.push_back(edge_polyline({{-80.0, top}, {80.0, top}}));

  AgentPlan ego;
  ego.path = 0;
  ego.s0 = rng.uniform(10.0, 45.0);
  ego.cruise = rng.uniform(cfg.speed_min, cfg.speed_max);
  ego.lat0 = rng.uniform(-0.25, 0.25);
  ego.yaw0 = rng.uniform(-0.02, 0.02);
  draw_dims(ego, rng);
  lay.plans.push_back(ego);

  fill_corridor_traffic(lay, cfg, rng.uniform_int(cfg.agents_min, cfg.agents_max), lanes, rng);
  return lay;
}

Layout arc_layout(const GeneratorConfig& cfg, Rng& rng) {
  Layout lay;
  const double w = cfg.lane_width;
  const double hw = 0.5 * w;
  const double radius = rng.uniform(25.0, 60.0);
  const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;  // +1 curves left
  const double cy = sign * radius;
  const double span = 150.0 / radius;
  const double ext_span = 210.0 / radius;

  LanePath egoPath;
  egoPath.pts = arc_points(0.0, cy, radius, sign, ext_span, 1.5);
  egoPath.finish();
  lay.paths.push_back(std::move(egoPath));
  lay.roadgraph.push_back(lane_polyline(arc_points(0.0, cy, radius, sign, span, 1.5), hw));

  std::vector<int> lanes = {0};
  double outer = radius + hw;
  if (rng.bernoulli(0.6)) {
    LanePath second;
    second.pts = arc_points(0.0, cy, radius + w, sign, ext_span, 1.5);
    second.finish();
    lay.paths.push_back(std::move(second));
    lay.roadgraph.push_back(lane_polyline(arc_points(0.0, cy, radius + w, sign, span, 1.5), hw));
    lanes.push_back(1);
    outer = radius + w + hw;
  }
  lay.roadgraph.push_back(edge_polyline(arc_points(0.0, cy, radius - hw, sign, span, 1.5)));
  lay.roadgraph.push_back(edge_polyline(arc_points(0.0, cy, outer, sign, span, 1.5)));

  AgentPlan ego;
  ego.path = 0;
  ego.s0 = rng.uniform(5.0, 25.0);
  ego.cruise = rng.uniform(cfg.speed_min, cfg.speed_max);
  ego.lat0 = rng.uniform(-0.25, 0.25);
  ego.yaw0 = rng.uniform(-0.02, 0.02);
  draw_dims(ego, rng);
  lay.plans.push_back(ego);

  fill_corridor_traffic(lay, cfg, rng.uniform_int(cfg.agents_min, cfg.agents_max), lanes, rng);
  return lay;
}

/// Shared crossing-corridor skeleton: corridor A along x (ego's), corridor B
/// along y meeting it at the origin, edges broken around the junction.
struct CrossingRoads {
  std::vector<int> a_lanes;     // path indexes, a_lanes[0] is the ego's
  std::vector<int> b_lanes;
  std::vector<double> b_lane_x;  // world x of each B lane
};

CrossingRoads crossing_layout(Layout& lay, const GeneratorConfig& cfg, bool second_a,
                              bool second_b, Rng& rng) {
  const double w = cfg.lane_width;
  const double hw = 0.5 * w;
  CrossingRoads roads;

  lay.paths.push_back(straight_path(-80.0, 0.0, 160.0, 0.0));
  lay.roadgraph.push_back(lane_polyline({{-80.0, 0.0}, {80.0, 0.0}}, hw));
  roads.a_lanes.push_back(0);
  double a_top = hw;
  if (second_a) {
    lay.paths.push_back(straight_path(80.0, w, -160.0, w));
    lay.roadgraph.push_back(lane_polyline({{-80.0, w}, {80.0, w}}, hw));
    roads.a_lanes.push_back(static_cast<int>(lay.paths.size()) - 1);
    a_top = w + hw;
  }

  const double b_dir = rng.bernoulli(0.5) ? 1.0 : -1.0;  // travel direction along y
  lay.paths.push_back(straight_path(0.0, -b_dir * 70.0, 0.0, b_dir * 130.0));
  lay.roadgraph.push_back(lane_polyline({{0.0, -70.0}, {0.0, 70.0}}, hw));
  roads.b_lanes.push_back(static_cast<int>(lay.paths.size()) - 1);
  roads.b_lane_x.push_back(0.0);
  double b_right = hw;
  if (second_b) {
    lay.paths.push_back(straight_path(w, b_dir * 70.0, w, -b_dir * 130.0));
    lay.roadgraph.push_back(lane_polyline({{w, -70.0}, {w, 70.0}}, hw));
    roads.b_lanes.push_back(static_cast<int>(lay.paths.size()) - 1);
    roads.b_lane_x.push_back(w);
    b_right = w + hw;
  }

  const double jx = b_right + 3.0;  // junction half-extent along x
  const double jy = a_top + 3.0;
  lay.roadgraph.push_back(edge_polyline({{-80.0, -hw}, {-jx, -hw}}));
  lay.roadgraph.push_back(edge_polyline({{jx, -hw}, {80.0, -hw}}));
  lay.roadgraph.push_back(edge_polyline({{-80.0, a_top}, {-jx, a_top}}));
  lay.roadgraph.push_back(edge_polyline({{jx, a_top}, {80.0, a_top}}));
  lay.roadgraph.push_back(edge_polyline({{-hw, -70.0}, {-hw, -jy}}));
  lay.roadgraph.push_back(edge_polyline({{-hw, jy}, {-hw, 70.0}}));
  lay.roadgraph.push_back(edge_polyline({{b_right, -70.0}, {b_right, -jy}}));
  lay.roadgraph.push_back(edge_polyline({{b_right, jy}, {b_right, 70.0}}));
  return roads;
}

/// Arc position of a B lane's crossing of the ego lane, measured along that
/// B lane's path (both B paths start 70 m from the crossing).
constexpr double kBConflictS = 70.0;

Layout intersection_layout(const GeneratorConfig& cfg, Rng& rng) {
  Layout lay;
  const CrossingRoads roads = crossing_layout(lay, cfg, rng.bernoulli(0.7),
                                              rng.bernoulli(0.6), rng);

  AgentPlan ego;
  ego.path = 0;
  ego.cruise = rng.uniform(cfg.speed_min, cfg.speed_max);
  const double t_arrive = rng.uniform(3.5, 6.5);  // at the first B lane (x = 0)
  ego.s0 = 80.0 - ego.cruise * t_arrive;
  ego.lat0 = rng.uniform(-0.2, 0.2);
  draw_dims(ego, rng);
  lay.plans.push_back(ego);

  // Each crosser crosses the ego's path well before or after the ego gets
  // there, and early enough to reach it inside the recorded horizon.
  const int crossers = 1 + (rng.bernoulli(0.4) ? 1 : 0);
  bool placed_crosser = false;
  for (int c = 0; c < crossers; ++c) {
    for (int attempt = 0; attempt < 10; ++attempt) {
      const std::size_t lane = rng.uniform_index(roads.b_lanes.size());
      const double offset = (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(2.5, 4.5);
      const double t_hit = t_arrive + roads.b_lane_x[lane] / ego.cruise + offset;
      if (t_hit < 1.2 || t_hit > 8.0) continue;
      AgentPlan p;
      p.path = roads.b_lanes[lane];
      p.cruise = rng.uniform(3.5, 8.0);
      p.s0 = kBConflictS - p.cruise * t_hit;
      if (p.s0 < 2.0 || p.s0 > 64.0 || !spawn_fits(lay, p.path, p.s0)) continue;
      draw_dims(p, rng);
      lay.plans.push_back(p);
      placed_crosser = true;
      break;
    }
  }
  if (!placed_crosser) {  // deterministic fallback: cross 2.5 s ahead of the ego
    AgentPlan p;
    p.path = roads.b_lanes[0];
    p.cruise = 5.0;
    p.s0 = kBConflictS - p.cruise * std::clamp(t_arrive - 2.5, 1.2, 8.0);
    draw_dims(p, rng);
    lay.plans.push_back(p);
  }

  if (rng.bernoulli(0.3)) {
    AgentPlan p;
    p.path = 0;
    p.s0 = ego.s0 + rng.uniform(30.0, 50.0);
    p.cruise = ego.cruise * rng.uniform(0.9, 1.1);
    draw_dims(p, rng);
    lay.plans.push_back(p);
  }
  if (roads.a_lanes.size() > 1 && rng.bernoulli(0.5)) {
    AgentPlan p;
    p.path = roads.a_lanes[1];
    p.s0 = rng.uniform(5.0, 140.0);
    p.cruise = rng.uniform(cfg.speed_min, cfg.speed_max);
    if (spawn_fits(lay, p.path, p.s0)) {
      draw_dims(p, rng);
      lay.plans.push_back(p);
    }
  }
  return lay;
}

Layout blind_corner_layout(const GeneratorConfig& cfg, Rng& rng) {
  Layout lay;
  const CrossingRoads roads = crossing_layout(lay, cfg, rng.bernoulli(0.4),
                                              rng.bernoulli(0.4), rng);

  // The crosser reaches the ego lane exactly when an unbraked ego would, so
  // the logged ego has to hold at a stop line until the crosser clears.
  const double t_conflict = rng.uniform(3.2, 4.2);
  const std::size_t lane = rng.uniform_index(roads.b_lanes.size());
  const double conflict_x = roads.b_lane_x[lane];

  AgentPlan ego;
  ego.path = 0;
  ego.cruise = rng.uniform(std::max(cfg.speed_min, 4.0), std::max(cfg.speed_max, 4.5));
  ego.s0 = 80.0 + conflict_x - ego.cruise * t_conflict;
  ego.lat0 = rng.uniform(-0.2, 0.2);
  draw_dims(ego, rng);

  AgentPlan crosser;
  crosser.path = roads.b_lanes[lane];
  crosser.cruise = rng.uniform(4.5, 8.0);
  crosser.s0 = kBConflictS - crosser.cruise * t_conflict;
  draw_dims(crosser, rng);

  // Fast egos need a stop line further out to come to a full halt, and the
  // hold must outlast both the crosser and the ego's own braking.
  const double stop_gap = std::max(6.0, ego.cruise * ego.cruise / (2.0 * kBrake) - 8.0);
  const double t_stopped =
      t_conflict - stop_gap / ego.cruise + ego.cruise / (2.0 * kBrake);
  ego.stop_s = 80.0 + conflict_x - stop_gap;
  ego.stop_until = std::max(t_conflict + 4.5 / crosser.cruise + 0.3, t_stopped + 0.5);
  lay.plans.push_back(ego);
  lay.plans.push_back(crosser);

  int extras = std::max(0, rng.uniform_int(cfg.agents_min, cfg.agents_max) - 1);
  extras = std::min(extras, 3);
  for (int i = 0; i < extras; ++i) {
    const double kind = rng.uniform();
    if (kind < 0.5) {  // parked on the right shoulder of the approach
      if (ego.stop_s - 14.0 < ego.s0 + 10.0) continue;
      AgentPlan p;
      p.path = 0;
      p.cruise = 0.0;
      p.s0 = rng.uniform(ego.s0 + 8.0, ego.stop_s - 14.0);
      p.lat0 = -(0.5 * cfg.lane_width + 1.2);
      p.parked = true;
      if (!spawn_fits(lay, p.path, p.s0)) continue;
      draw_dims(p, rng);
      p.width = 1.8;
      lay.plans.push_back(p);
    } else if (kind < 0.8 && roads.b_lanes.size() > 1) {  // late crosser, other B lane
      AgentPlan p;
      p.path = roads.b_lanes[1 - lane];
      p.cruise = rng.uniform(4.0, 7.0);
      const double t_hit = ego.stop_until + rng.uniform(4.3, 5.5);
      p.s0 = kBConflictS - p.cruise * t_hit;
      if (p.s0 < 2.0 || !spawn_fits(lay, p.path, p.s0)) continue;
      draw_dims(p, rng);
      lay.plans.push_back(p);
    } else if (roads.a_lanes.size() > 1) {  // oncoming traffic
      AgentPlan p;
      p.path = roads.a_lanes[1];
      p.s0 = rng.uniform(5.0, 140.0);
      p.cruise = rng.uniform(cfg.speed_min, cfg.speed_max);
      if (!spawn_fits(lay, p.path, p.s0)) continue;
      draw_dims(p, rng);
      lay.plans.push_back(p);
    }
  }
  return lay;
}

struct Mover {
  double x = 0.0, y = 0.0, yaw = 0.0, v = 0.0, s = 0.0;
};

std::vector<std::vector<AgentState>> roll_tracks(const Layout& lay) {
  const std::size_t n = lay.plans.size();
  std::vector<Mover> movers(n);
  std::vector<std::vector<AgentState>> tracks(n);

  for (std::size_t i = 0; i < n; ++i) {
    const AgentPlan& plan = lay.plans[i];
    const LanePath& path = lay.paths[static_cast<std::size_t>(plan.path)];
    const auto [px, py] = path.point_at(plan.s0);
    const double h = path.heading_at(plan.s0);
    Mover& m = movers[i];
    m.x = px - plan.lat0 * std::sin(h);
    m.y = py + plan.lat0 * std::cos(h);
    m.yaw = wrap_angle(h + plan.yaw0);
    m.v = plan.cruise;
    m.s = path.project(m.x, m.y);
  }

  std::vector<double> new_v(n, 0.0);
  for (int t = 0; t < kScenarioSteps; ++t) {
    if (t > 0) {
      for (std::size_t i = 0; i < n; ++i) {
        const AgentPlan& plan = lay.plans[i];
        const Mover& m = movers[i];
        double target = plan.cruise;
        if (t * kDt < plan.stop_until) {
          target = std::min(target, std::sqrt(2.0 * kBrake * std::max(0.0, plan.stop_s - m.s)));
        }
        // Follower rule: cap by a braking curve toward the nearest same-lane
        // agent ahead.
        double lead_s = kInf, lead_v = 0.0, lead_len = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i || lay.plans[j].parked || lay.plans[j].path != plan.path) continue;
          if (movers[j].s > m.s && movers[j].s < lead_s) {
            lead_s = movers[j].s;
            lead_v = movers[j].v;
            lead_len = lay.plans[j].length;
          }
        }
        if (lead_s < kInf) {
          const double gap = lead_s - m.s - 0.5 * (plan.length + lead_len);
          target = std::min(target, lead_v + std::sqrt(2.0 * kBrake *
                                                       std::max(0.0, gap - kMinGap)));
        }
        new_v[i] = std::clamp(target, std::max(0.0, m.v - kAccel * kDt), m.v + kAccel * kDt);
      }
      for (std::size_t i = 0; i < n; ++i) {
        Mover& m = movers[i];
        m.v = new_v[i];
        if (m.v > 1e-9) {
          const LanePath& path = lay.paths[static_cast<std::size_t>(lay.plans[i].path)];
          const double look = std::max(2.5, 0.7 * m.v);
          const auto [tx, ty] = path.point_at(m.s + look);
          const double alpha = wrap_angle(std::atan2(ty - m.y, tx - m.x) - m.yaw);
          const double curvature = 2.0 * std::sin(alpha) / look;
          const double dyaw =
              std::clamp(m.v * curvature * kDt, -kYawRate * kDt, kYawRate * kDt);
          m.yaw = wrap_angle(m.yaw + dyaw);
          m.x += m.v * std::cos(m.yaw) * kDt;
          m.y += m.v * std::sin(m.yaw) * kDt;
          m.s = path.project(m.x, m.y);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Mover& m = movers[i];
      AgentState st;
      st.pose = Pose2D::make(m.x, m.y, m.yaw);
      st.vx = m.v * std::cos(m.yaw);
      st.vy = m.v * std::sin(m.yaw);
      st.length = lay.plans[i].length;
      st.width = lay.plans[i].width;
      tracks[i].push_back(st);
    }
  }
  return tracks;
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

/// Snap poses to a 1e-6 grid and make velocities the exact backward
/// difference of the stored positions, so speed computed from velocity and
/// from displacement agree to rounding.
void quantize_track(std::vector<AgentState>& track) {
  for (AgentState& st : track) {
    st.pose = Pose2D::make(round6(st.pose.x), round6(st.pose.y), round6(st.pose.yaw));
    st.z = 0.0;
  }
  for (std::size_t t = 1; t < track.size(); ++t) {
    track[t].vx = (track[t].pose.x - track[t - 1].pose.x) / kDt;
    track[t].vy = (track[t].pose.y - track[t - 1].pose.y) / kDt;
  }
  if (track.size() > 1) {
    track[0].vx = track[1].vx;
    track[0].vy = track[1].vy;
  }
}

double logged_mean_speed(const std::vector<AgentState>& track) {
  double acc = 0.0;
  for (std::size_t t = 1; t < track.size(); ++t) {
    acc += std::hypot(track[t].pose.x - track[t - 1].pose.x,
                      track[t].pose.y - track[t - 1].pose.y) / kDt;
  }
  return track.size() > 1 ? acc / static_cast<double>(track.size() - 1) : 0.0;
}

Scenario assemble(const Layout& lay, ScenarioFamily family, Rng& rng) {
  std::vector<std::vector<AgentState>> tracks = roll_tracks(lay);
  for (auto& track : tracks) quantize_track(track);

  Scenario s;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "-%08llx",
                static_cast<unsigned long long>(rng.next_u64() & 0xffffffffULL));
  s.id = to_string(family) + buf;
  s.roadgraph = lay.roadgraph;
  s.ego_index = static_cast<int>(rng.uniform_index(tracks.size()));
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    // plans[0] (the ego) lands at s.ego_index, the rest keep their order.
    const std::size_t plan =
        i == static_cast<std::size_t>(s.ego_index)
            ? 0
            : (i < static_cast<std::size_t>(s.ego_index) ? i + 1 : i);
    s.tracks.push_back(std::move(tracks[plan]));
  }
  return s;
}

bool ego_is_clean(const Scenario& s) {
  if (logged_mean_speed(s.ego_track()) < 0.7) return false;
  std::vector<AgentState> column;
  for (int t = 0; t < kScenarioSteps; ++t) {
    column.clear();
    for (const auto& track : s.tracks) column.push_back(track[static_cast<std::size_t>(t)]);
    const StepMetrics m = step_metrics(column, s.ego_index, s.roadgraph,
                                       s.ego_track()[static_cast<std::size_t>(t)].pose);
    if (m.overlap || m.offroad) return false;
  }
  return true;
}

Layout build_layout(const GeneratorConfig& cfg, ScenarioFamily family, Rng& rng) {
  switch (family) {
    case ScenarioFamily::kStraight: return straight_layout(cfg, rng);
    case ScenarioFamily::kArc: return arc_layout(cfg, rng);
    case ScenarioFamily::kIntersection: return intersection_layout(cfg, rng);
    case ScenarioFamily::kBlindCorner: return blind_corner_layout(cfg, rng);
  }
  throw Error("unknown scenario family");
}

}  // namespace

std::string to_string(ScenarioFamily f) {
  switch (f) {
    case ScenarioFamily::kStraight: return "straight";
    case ScenarioFamily::kArc: return "arc";
    case ScenarioFamily::kIntersection: return "intersection";
    case ScenarioFamily::kBlindCorner: return "blind_corner";
  }
  return "straight";
}

ScenarioFamily scenario_family_from_string(const std::string& s) {
  if (s == "straight") return ScenarioFamily::kStraight;
  if (s == "arc") return ScenarioFamily::kArc;
  if (s == "intersection") return ScenarioFamily::kIntersection;
  if (s == "blind_corner") return ScenarioFamily::kBlindCorner;
  throw Error("unknown scenario family: " + s);
}

void GeneratorConfig::validate() const {
  require(family_weights.size() == 4, "generator config: family_weights needs 4 entries");
  double sum = 0.0;
  for (double w : family_weights) {
    require(std::isfinite(w) && w >= 0.0, "generator config: negative family weight");
    sum += w;
  }
  require(sum > 0.0, "generator config: family weights sum to zero");
  require(agents_min >= 1 && agents_min <= agents_max && agents_max <= 12,
          "generator config: need 1 <= agents_min <= agents_max <= 12");
  require(speed_min > 0.0 && speed_min <= speed_max && speed_max <= 20.0,
          "generator config: need 0 < speed_min <= speed_max <= 20");
  require(lane_width >= 3.0 && lane_width <= 10.0,
          "generator config: lane_width outside [3, 10]");
  require(retry_budget >= 1, "generator config: retry_budget < 1");
}

Scenario generate_scenario(const GeneratorConfig& cfg, Rng& rng) {
  cfg.validate();
  const double sum = cfg.family_weights[0] + cfg.family_weights[1] + cfg.family_weights[2] +
                     cfg.family_weights[3];
  const double u = rng.uniform() * sum;
  ScenarioFamily family = ScenarioFamily::kBlindCorner;
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    acc += cfg.family_weights[static_cast<std::size_t>(i)];
    if (u < acc) {
      family = static_cast<ScenarioFamily>(i);
      break;
    }
  }
  return generate_scenario(cfg, family, rng);
}

Scenario generate_scenario(const GeneratorConfig& cfg, ScenarioFamily family, Rng& rng) {
  cfg.validate();
  for (int attempt = 0; attempt < cfg.retry_budget; ++attempt) {
    const Layout lay = build_layout(cfg, family, rng);
    Scenario s = assemble(lay, family, rng);
    s.validate();
    if (ego_is_clean(s)) return s;
  }
  throw Error("scenario generation: retry budget exhausted (family " + to_string(family) +
              ")");
}

std::vector<Scenario> generate_corpus(const GeneratorConfig& cfg, int count, Rng& rng) {
  cfg.validate();
  require(count >= 0, "generate_corpus: negative count");
  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng child = rng.child("scenario", static_cast<std::uint64_t>(i));
    out.push_back(generate_scenario(cfg, child));
  }
  return out;
}

}  // namespace gaplab
