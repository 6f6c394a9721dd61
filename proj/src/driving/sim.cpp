#include "gaplab/driving/sim.hpp"

#include <string>

#include "gaplab/common/error.hpp"
#include "gaplab/core/geometry.hpp"
#include "gaplab/core/kinematics.hpp"

namespace gaplab {
namespace {

std::vector<AgentState> states_at(const Scenario& s, int t) {
  std::vector<AgentState> out;
  out.reserve(s.tracks.size());
  for (const auto& track : s.tracks) out.push_back(track[static_cast<std::size_t>(t)]);
  return out;
}

Observation observe_state(const SimState& state, const ObservationConfig& cfg, Rng& rng) {
  SceneView scene;
  scene.agents = state.current;
  scene.road_points = state.road_points;
  scene.ego_index = state.scenario->ego_index;
  scene.timestep = state.t;
  return observe(scene, cfg, rng);
}

StepResult advance(SimState& state, const AgentState& new_ego, const ObservationConfig& cfg,
                   Rng& rng) {
  const Scenario& s = *state.scenario;
  const int nt = state.t + 1;
  for (std::size_t i = 0; i < state.current.size(); ++i) {
    if (static_cast<int>(i) != s.ego_index) {
      state.current[i] = s.tracks[i][static_cast<std::size_t>(nt)];
    }
  }
  state.current[static_cast<std::size_t>(s.ego_index)] = new_ego;
  state.t = nt;

  StepResult r;
  r.metrics = step_metrics(state.current, s.ego_index, s.roadgraph,
                           s.ego_track()[static_cast<std::size_t>(nt)].pose);
  r.reward = -(r.metrics.overlap ? 1.0 : 0.0) - (r.metrics.offroad ? 1.0 : 0.0);
  r.done = state.done();
  r.observation = observe_state(state, cfg, rng);
  return r;
}

}  // namespace

std::pair<SimState, Observation> reset(const Scenario& s, const ObservationConfig& cfg,
                                       bool ego_controlled, Rng& rng) {
  s.validate();
  cfg.validate();
  SimState state;
  state.scenario = &s;
  state.t = kContextSteps - 1;
  state.current = states_at(s, state.t);
  state.ego_controlled = ego_controlled;
  state.road_points = sample_roadgraph(s.roadgraph, kRoadSampleSpacing);
  Observation obs = observe_state(state, cfg, rng);
  return {std::move(state), std::move(obs)};
}

std::vector<Observation> replay_context(const Scenario& s, const ObservationConfig& cfg,
                                        Rng& rng) {
  s.validate();
  cfg.validate();
  const std::vector<RoadPoint> road = sample_roadgraph(s.roadgraph, kRoadSampleSpacing);
  std::vector<Observation> out;
  out.reserve(kContextSteps);
  std::vector<AgentState> current;
  for (int t = 0; t < kContextSteps; ++t) {
    current = states_at(s, t);
    SceneView scene;
    scene.agents = current;
    scene.road_points = road;
    scene.ego_index = s.ego_index;
    scene.timestep = t;
    out.push_back(observe(scene, cfg, rng));
  }
  return out;
}

StepResult step(SimState& state, const DeltaAction& ego_action, const ObservationConfig& cfg,
                Rng& rng) {
  const Scenario& s = *state.scenario;
  require(!state.done(), "step: episode already done (scenario '" + s.id + "')");
  require(state.ego_controlled, "step: ego is not controlled (scenario '" + s.id + "')");
  return advance(state, step_delta(state.ego(), ego_action, kDt), cfg, rng);
}

StepResult step_logged(SimState& state, const ObservationConfig& cfg, Rng& rng) {
  const Scenario& s = *state.scenario;
  require(!state.done(), "step_logged: episode already done (scenario '" + s.id + "')");
  require(!state.ego_controlled,
          "step_logged: ego is controlled (scenario '" + s.id + "')");
  return advance(state, s.ego_track()[static_cast<std::size_t>(state.t + 1)], cfg, rng);
}

std::vector<DeltaAction> expert_actions(const Scenario& s) {
  const auto& track = s.ego_track();
  require(track.size() == static_cast<std::size_t>(kScenarioSteps),
          "expert actions: ego track of scenario '" + s.id + "' has wrong length");
  std::vector<DeltaAction> out;
  out.reserve(kHorizonSteps);
  for (int t = kContextSteps - 1; t + 1 < kScenarioSteps; ++t) {
    const AgentState& prev = track[static_cast<std::size_t>(t)];
    const AgentState& next = track[static_cast<std::size_t>(t + 1)];
    require(prev.valid && next.valid, "expert actions: ego state of scenario '" + s.id +
                                          "' invalid at timestep " +
                                          std::to_string(next.valid ? t : t + 1));
    out.push_back(inverse_kinematics(prev, next, kDt));
  }
  return out;
}

DeltaAction expert_action_toward_log(const SimState& state) {
  const Scenario& s = *state.scenario;
  require(!state.done(), "expert action: episode already done (scenario '" + s.id + "')");
  const AgentState& target = s.ego_track()[static_cast<std::size_t>(state.t + 1)];
  require(target.valid, "expert action: ego log of scenario '" + s.id +
                            "' invalid at timestep " + std::to_string(state.t + 1));
  return inverse_kinematics(state.ego(), target, kDt);
}

std::vector<StepMetrics> logged_ego_metrics(const Scenario& s) {
  std::vector<StepMetrics> out;
  out.reserve(kHorizonSteps);
  std::vector<AgentState> current;
  for (int t = kContextSteps; t < kScenarioSteps; ++t) {
    current = states_at(s, t);
    out.push_back(step_metrics(current, s.ego_index, s.roadgraph,
                               s.ego_track()[static_cast<std::size_t>(t)].pose));
  }
  return out;
}

}  // namespace gaplab
