#pragma once

#include <limits>
#include <span>
#include <vector>

#include "gaplab/common/rng.hpp"
#include "gaplab/core/types.hpp"

namespace gaplab {

enum class ObsMode {
  kFull,
  kCircularFov,
  kConicFov,
  kGaussianNoise,
  kRandomMasking,
};

std::string to_string(ObsMode m);
ObsMode obs_mode_from_string(const std::string& s);

/// Which observation constraint the imitator lives under and how big the
/// fixed-size feature tensors are.
struct ObservationConfig {
  ObsMode mode = ObsMode::kFull;
  double radius_r = std::numeric_limits<double>::infinity();  // fov modes, m
  double opening_angle = 2.0 * kPi;  // conic full opening angle, rad
  double noise_sigma = 0.0;          // gaussian position noise, m
  double mask_prob = 0.0;            // per-object per-step masking probability
  int max_objects = 8;
  int max_road_points = 32;

  /// Throws Error when a parameter required by the active mode is missing or
  /// out of range.
  void validate() const;
};

/// Ego-frame view of the scene. Rows with valid = 0 are all-zero. Feature
/// layouts (row-major):
///   object rows:  rel_x, rel_y, rel_vx, rel_vy, rel_yaw, length, width, valid
///   road rows:    rel_x, rel_y, lane_center, road_edge, other, valid
struct Observation {
  static constexpr int kObjectFeatures = 8;
  static constexpr int kRoadFeatures = 6;

  int max_objects = 0;
  int max_road_points = 0;
  std::vector<double> object_features;  // max_objects x kObjectFeatures
  std::vector<double> road_features;    // max_road_points x kRoadFeatures
  double ego_speed = 0.0;
  int timestep = 0;

  double object(int row, int col) const {
    return object_features[static_cast<std::size_t>(row * kObjectFeatures + col)];
  }
  double road(int row, int col) const {
    return road_features[static_cast<std::size_t>(row * kRoadFeatures + col)];
  }
  bool object_valid(int row) const { return object(row, 7) != 0.0; }
  bool road_valid(int row) const { return road(row, 5) != 0.0; }

  bool operator==(const Observation& other) const = default;
};

/// Everything an observation function may look at. Agents and road points are
/// true state; constraints decide what survives into the feature tensor.
struct SceneView {
  std::span<const AgentState> agents;
  std::span<const RoadPoint> road_points;
  int ego_index = 0;
  int timestep = 0;
};

/// Unconstrained ego-frame observation: every valid object (nearest first)
/// and the nearest road points, deterministic.
Observation observe_full(const SceneView& scene, const ObservationConfig& cfg);

/// Full observation with rows beyond ego-frame distance r invalidated.
Observation observe_circular(const SceneView& scene, const ObservationConfig& cfg);

/// Row survives iff distance <= r and |bearing| <= opening_angle / 2.
Observation observe_conic(const SceneView& scene, const ObservationConfig& cfg);

/// A fresh 2D Gaussian perturbation of the ego's assumed global position is
/// drawn per call; every non-ego row shifts by the same amount in the ego
/// frame. Velocities, yaws and ego_speed stay clean.
Observation observe_noisy_position(const SceneView& scene, const ObservationConfig& cfg, Rng& rng);

/// Each non-ego object row is independently dropped with probability
/// mask_prob, re-drawn every call. Road rows are unaffected.
Observation observe_random_masking(const SceneView& scene, const ObservationConfig& cfg, Rng& rng);

/// Dispatch on cfg.mode.
Observation observe(const SceneView& scene, const ObservationConfig& cfg, Rng& rng);

}  // namespace gaplab
