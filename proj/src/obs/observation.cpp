#include "gaplab/obs/observation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaplab/common/error.hpp"

namespace gaplab {

std::string to_string(ObsMode m) {
  switch (m) {
    case ObsMode::kFull: return "full";
    case ObsMode::kCircularFov: return "circular_fov";
    case ObsMode::kConicFov: return "conic_fov";
    case ObsMode::kGaussianNoise: return "gaussian_noise";
    case ObsMode::kRandomMasking: return "random_masking";
  }
  return "full";
}

ObsMode obs_mode_from_string(const std::string& s) {
  if (s == "full") return ObsMode::kFull;
  if (s == "circular_fov" || s == "circular") return ObsMode::kCircularFov;
  if (s == "conic_fov" || s == "conic") return ObsMode::kConicFov;
  if (s == "gaussian_noise" || s == "gaussian") return ObsMode::kGaussianNoise;
  if (s == "random_masking" || s == "masking") return ObsMode::kRandomMasking;
  throw Error("unknown observation mode: " + s);
}

void ObservationConfig::validate() const {
  require(max_objects > 0 && max_road_points > 0,
          "observation config: tensor sizes must be positive");
  switch (mode) {
    case ObsMode::kFull:
      break;
    case ObsMode::kCircularFov:
      require(radius_r > 0.0, "observation config: circular fov needs radius_r > 0");
      break;
    case ObsMode::kConicFov:
      require(radius_r > 0.0, "observation config: conic fov needs radius_r > 0");
      require(opening_angle > 0.0 && opening_angle <= 2.0 * kPi,
              "observation config: conic fov needs opening_angle in (0, 2pi]");
      break;
    case ObsMode::kGaussianNoise:
      require(noise_sigma >= 0.0, "observation config: gaussian mode needs noise_sigma >= 0");
      break;
    case ObsMode::kRandomMasking:
      require(mask_prob >= 0.0 && mask_prob <= 1.0,
              "observation config: masking mode needs mask_prob in [0, 1]");
      break;
  }
}

namespace {

struct Frame {
  double ox, oy;  // assumed ego position
  double c, s;    // cos/sin of ego yaw
};

// The base tensor: nearest-first selection in the true geometry, ego row
// included (distance zero). Noise shifts the assumed origin afterwards;
// FoV masks rows in place, preserving row assignment.
Observation build_base(const SceneView& scene, const ObservationConfig& cfg, double noise_x,
                       double noise_y) {
  cfg.validate();
  const auto n_agents = scene.agents.size();
  require(scene.ego_index >= 0 && static_cast<std::size_t>(scene.ego_index) < n_agents,
          "observe: ego index out of range");
  const AgentState& ego = scene.agents[static_cast<std::size_t>(scene.ego_index)];
  require(ego.valid, "observe: ego agent invalid at current timestep");

  Observation obs;
  obs.max_objects = cfg.max_objects;
  obs.max_road_points = cfg.max_road_points;
  obs.object_features.assign(
      static_cast<std::size_t>(cfg.max_objects) * Observation::kObjectFeatures, 0.0);
  obs.road_features.assign(
      static_cast<std::size_t>(cfg.max_road_points) * Observation::kRoadFeatures, 0.0);
  obs.ego_speed = ego.speed();
  obs.timestep = scene.timestep;

  const Frame frame{ego.pose.x + noise_x, ego.pose.y + noise_y, std::cos(ego.pose.yaw),
                    std::sin(ego.pose.yaw)};

  // Ego always occupies row 0; remaining rows hold the nearest other agents
  // by true distance, ties broken by agent id.
  std::vector<std::pair<double, int>> order;
  order.reserve(n_agents);
  order.emplace_back(0.0, scene.ego_index);
  std::vector<std::pair<double, int>> others;
  others.reserve(n_agents);
  for (std::size_t i = 0; i < n_agents; ++i) {
    if (!scene.agents[i].valid || static_cast<int>(i) == scene.ego_index) continue;
    const double d = std::hypot(scene.agents[i].pose.x - ego.pose.x,
                                scene.agents[i].pose.y - ego.pose.y);
    others.emplace_back(d, static_cast<int>(i));
  }
  std::sort(others.begin(), others.end());
  order.insert(order.end(), others.begin(), others.end());

  const int n_obj = std::min<int>(cfg.max_objects, static_cast<int>(order.size()));
  for (int row = 0; row < n_obj; ++row) {
    const AgentState& a = scene.agents[static_cast<std::size_t>(order[row].second)];
    double* f = &obs.object_features[static_cast<std::size_t>(row) * Observation::kObjectFeatures];
    if (row == 0) {
      // The ego pins its own frame: its relative position and yaw are zero in
      // every mode, noise included.
      f[0] = 0.0;
      f[1] = 0.0;
      f[4] = 0.0;
    } else {
      const double dx = a.pose.x - frame.ox;
      const double dy = a.pose.y - frame.oy;
      f[0] = frame.c * dx + frame.s * dy;
      f[1] = -frame.s * dx + frame.c * dy;
      f[4] = wrap_angle(a.pose.yaw - ego.pose.yaw);
    }
    f[2] = frame.c * a.vx + frame.s * a.vy;
    f[3] = -frame.s * a.vx + frame.c * a.vy;
    f[5] = a.length;
    f[6] = a.width;
    f[7] = 1.0;
  }

  // Road points, ascending true distance, ties by point index.
  std::vector<std::pair<double, int>> road_order;
  road_order.reserve(scene.road_points.size());
  for (std::size_t i = 0; i < scene.road_points.size(); ++i) {
    const double d =
        std::hypot(scene.road_points[i].x - ego.pose.x, scene.road_points[i].y - ego.pose.y);
    road_order.emplace_back(d, static_cast<int>(i));
  }
  std::sort(road_order.begin(), road_order.end());

  const int n_road = std::min<int>(cfg.max_road_points, static_cast<int>(road_order.size()));
  for (int row = 0; row < n_road; ++row) {
    const RoadPoint& p = scene.road_points[static_cast<std::size_t>(road_order[row].second)];
    double* f = &obs.road_features[static_cast<std::size_t>(row) * Observation::kRoadFeatures];
    const double dx = p.x - frame.ox;
    const double dy = p.y - frame.oy;
    f[0] = frame.c * dx + frame.s * dy;
    f[1] = -frame.s * dx + frame.c * dy;
    f[2 + static_cast<int>(p.kind)] = 1.0;
    f[5] = 1.0;
  }
  return obs;
}

void zero_object_row(Observation& obs, int row) {
  double* f = &obs.object_features[static_cast<std::size_t>(row) * Observation::kObjectFeatures];
  std::fill(f, f + Observation::kObjectFeatures, 0.0);
}

void zero_road_row(Observation& obs, int row) {
  double* f = &obs.road_features[static_cast<std::size_t>(row) * Observation::kRoadFeatures];
  std::fill(f, f + Observation::kRoadFeatures, 0.0);
}

// FoV predicate on the ego-frame coordinates of a base (noise-free) tensor.
void apply_fov(Observation& obs, double radius, double half_angle, bool use_angle) {
  for (int row = 0; row < obs.max_objects; ++row) {
    if (!obs.object_valid(row)) continue;
    const double x = obs.object(row, 0);
    const double y = obs.object(row, 1);
    const double d = std::hypot(x, y);
    const double bearing = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
    if (d > radius || (use_angle && std::fabs(bearing) > half_angle)) zero_object_row(obs, row);
  }
  for (int row = 0; row < obs.max_road_points; ++row) {
    if (!obs.road_valid(row)) continue;
    const double x = obs.road(row, 0);
    const double y = obs.road(row, 1);
    const double d = std::hypot(x, y);
    const double bearing = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
    if (d > radius || (use_angle && std::fabs(bearing) > half_angle)) zero_road_row(obs, row);
  }
}

}  // namespace

Observation observe_full(const SceneView& scene, const ObservationConfig& cfg) {
  return build_base(scene, cfg, 0.0, 0.0);
}

Observation observe_circular(const SceneView& scene, const ObservationConfig& cfg) {
  Observation obs = build_base(scene, cfg, 0.0, 0.0);
  apply_fov(obs, cfg.radius_r, 0.0, false);
  return obs;
}

Observation observe_conic(const SceneView& scene, const ObservationConfig& cfg) {
  Observation obs = build_base(scene, cfg, 0.0, 0.0);
  apply_fov(obs, cfg.radius_r, 0.5 * cfg.opening_angle, true);
  return obs;
}

Observation observe_noisy_position(const SceneView& scene, const ObservationConfig& cfg,
                                   Rng& rng) {
  cfg.validate();
  const double nx = rng.normal(0.0, cfg.noise_sigma);
  const double ny = rng.normal(0.0, cfg.noise_sigma);
  return build_base(scene, cfg, nx, ny);
}

Observation observe_random_masking(const SceneView& scene, const ObservationConfig& cfg,
                                   Rng& rng) {
  Observation obs = build_base(scene, cfg, 0.0, 0.0);
  // Row 0 is the ego and is never hidden from itself; every other visible
  // object drops out independently, redrawn each step.
  for (int row = 1; row < obs.max_objects; ++row) {
    if (!obs.object_valid(row)) continue;
    if (rng.bernoulli(cfg.mask_prob)) zero_object_row(obs, row);
  }
  return obs;
}

Observation observe(const SceneView& scene, const ObservationConfig& cfg, Rng& rng) {
  switch (cfg.mode) {
    case ObsMode::kFull: return observe_full(scene, cfg);
    case ObsMode::kCircularFov: return observe_circular(scene, cfg);
    case ObsMode::kConicFov: return observe_conic(scene, cfg);
    case ObsMode::kGaussianNoise: return observe_noisy_position(scene, cfg, rng);
    case ObsMode::kRandomMasking: return observe_random_masking(scene, cfg, rng);
  }
  throw Error("observe: unknown mode");
}

}  // namespace gaplab
