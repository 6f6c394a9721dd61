#pragma once

#include <string>
#include <vector>

#include "gaplab/common/rng.hpp"
#include "gaplab/driving/scenario.hpp"

namespace gaplab {

/// Scene families the generator draws from. Straight and arc corridors carry
/// lane-following traffic; intersections add crossing traffic timed to miss
/// the ego; blind-corner scenes time a crosser onto the ego's path so the
/// logged ego must yield to an agent that approaches from outside a narrow
/// field of view.
enum class ScenarioFamily { kStraight, kArc, kIntersection, kBlindCorner };

std::string to_string(ScenarioFamily f);
ScenarioFamily scenario_family_from_string(const std::string& s);

struct GeneratorConfig {
  /// Draw weights for straight, arc, intersection, blind_corner.
  std::vector<double> family_weights{0.25, 0.25, 0.25, 0.25};
  int agents_min = 2;  // background agents, ego excluded
  int agents_max = 6;
  double speed_min = 3.0;  // m/s, cruise-speed draw range
  double speed_max = 10.0;
  double lane_width = 5.0;  // center-to-center lane spacing, m
  int retry_budget = 40;

  void validate() const;
};

/// Draw one scenario. Scripted agents track lane centerlines with
/// pure-pursuit steering and accelerate-limited speed control (followers
/// brake for leaders, the blind-corner ego brakes for its crosser); the
/// attempt is rerolled until the logged ego has zero overlap and offroad
/// events and mean speed >= 0.7 m/s. Deterministic given the rng state.
/// Throws when the retry budget is exhausted.
Scenario generate_scenario(const GeneratorConfig& cfg, Rng& rng);

/// As above with the family forced instead of drawn.
Scenario generate_scenario(const GeneratorConfig& cfg, ScenarioFamily family, Rng& rng);

/// Generate `count` scenarios from per-index child streams of `rng`, so the
/// corpus is reproducible and any prefix of it is stable under count changes.
std::vector<Scenario> generate_corpus(const GeneratorConfig& cfg, int count, Rng& rng);

}  // namespace gaplab
