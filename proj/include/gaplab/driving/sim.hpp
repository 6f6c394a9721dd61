#pragma once

#include <utility>
#include <vector>

#include "gaplab/common/rng.hpp"
#include "gaplab/core/types.hpp"
#include "gaplab/driving/scenario.hpp"
#include "gaplab/obs/observation.hpp"

namespace gaplab {

/// Spacing of the resampled road points that observations see.
constexpr double kRoadSampleSpacing = 1.0;

/// A scenario being rolled forward. Non-ego agents always equal their logged
/// track at time t; the ego does too unless ego_controlled is set, in which
/// case step() drives it by actions.
struct SimState {
  const Scenario* scenario = nullptr;
  int t = kContextSteps - 1;
  std::vector<AgentState> current;
  bool ego_controlled = true;
  std::vector<RoadPoint> road_points;  // sampled once at reset

  bool done() const { return t >= kScenarioSteps - 1; }
  const AgentState& ego() const {
    return current[static_cast<std::size_t>(scenario->ego_index)];
  }
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  StepMetrics metrics;
  bool done = false;
};

/// Validate the scenario and position every agent at its logged state on the
/// last context step (t = 9). Returns the state and its observation.
std::pair<SimState, Observation> reset(const Scenario& s, const ObservationConfig& cfg,
                                       bool ego_controlled, Rng& rng);

/// Observations of the 10 logged context states (t = 0..9), for recurrent
/// warm-up before the first action. Stochastic constraints draw from rng in
/// timestep order.
std::vector<Observation> replay_context(const Scenario& s, const ObservationConfig& cfg,
                                        Rng& rng);

/// Advance one step: the ego moves by the world-frame action, everyone else
/// snaps to their logged t+1 state. Reward is -(overlap) - (offroad) on the
/// post-step state; metrics include log divergence against the logged ego.
/// Throws when the episode is done or the ego is not controlled.
StepResult step(SimState& state, const DeltaAction& ego_action, const ObservationConfig& cfg,
                Rng& rng);

/// Advance one step with every agent (ego included) on its log. Requires
/// ego_controlled == false.
StepResult step_logged(SimState& state, const ObservationConfig& cfg, Rng& rng);

/// The 81 world-frame actions recovered from the logged ego track by inverse
/// kinematics; action i maps logged state 9+i onto logged state 10+i.
std::vector<DeltaAction> expert_actions(const Scenario& s);

/// Action mapping the current (possibly diverged) ego state onto the logged
/// ego state at t+1. Replaying these keeps the ego glued to the log even
/// after a perturbation.
DeltaAction expert_action_toward_log(const SimState& state);

/// Safety metrics of the logged ego over the 81 horizon states (t = 10..90),
/// as step() would report them under expert replay.
std::vector<StepMetrics> logged_ego_metrics(const Scenario& s);

}  // namespace gaplab
