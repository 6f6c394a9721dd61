#pragma once

#include <string>
#include <vector>

#include "gaplab/driving/scenario.hpp"
#include "gaplab/learn/discretizer.hpp"
#include "gaplab/learn/losses.hpp"
#include "gaplab/nn/checkpoint.hpp"
#include "gaplab/obs/observation.hpp"

namespace gaplab {

struct DrivingTrainOptions {
  ObservationConfig obs;          // the imitator's constraint; shapes the net
  ActionDiscretizer discretizer;  // default grids, 8 x 8 x 4 = 256 actions

  int enc_hidden = 64;
  int embed_dim = 64;
  int rnn_hidden = 128;
  int value_hidden = 64;

  int eval_every = 10;   // probe cadence, in updates
  int eval_probes = 16;  // leading corpus scenarios behind the probe columns

  std::string run_config;  // canonical config text stored in checkpoints

  void validate() const;
};

NetConfig driving_net_config(const DrivingTrainOptions& opt);

/// Fraction of the corpus's ego-frame expert actions that fall outside the
/// discretizer's range on at least one axis.
double expert_saturation_rate(const std::vector<Scenario>& corpus,
                              const ActionDiscretizer& disc);

/// Greedy-rollout results for one scenario. Step counts and divergence
/// statistics cover the 81 controlled steps.
struct DrivingEpisodeStats {
  double episode_return = 0.0;
  bool overlap_any = false;
  bool offroad_any = false;
  int overlap_steps = 0;
  int offroad_steps = 0;
  double max_log_divergence = 0.0;
  double mean_log_divergence = 0.0;

  bool operator==(const DrivingEpisodeStats&) const = default;
};

/// Greedy-action rollouts of a policy, one row per scenario, all episodes
/// advancing in lock step (one forward pass per timestep). Stochastic
/// observation constraints draw from per-lane streams split off rng by
/// scenario position, so a fixed (scenarios, rng) pair reproduces exactly.
std::vector<DrivingEpisodeStats> driving_greedy_rollouts(
    const std::vector<Scenario>& scenarios, const NetConfig& net, const Params& params,
    const ObservationConfig& obs_cfg, const ActionDiscretizer& disc, const Rng& rng);

/// Full state history of one greedy rollout, for rendering. states[t] holds
/// every agent at timestep t (0..90); the first 10 frames are the logged
/// context. metrics[i] and actions[i] describe the controlled transition
/// into frame 10 + i. Bit-identical to lane 0 of driving_greedy_rollouts.
struct DrivingTrajectory {
  std::vector<std::vector<AgentState>> states;
  std::vector<StepMetrics> metrics;
  std::vector<int> actions;
};

DrivingTrajectory driving_greedy_trajectory(const Scenario& s, const NetConfig& net,
                                            const Params& params,
                                            const ObservationConfig& obs_cfg,
                                            const ActionDiscretizer& disc, const Rng& rng);

/// Update loop over scenario batches. Each lane holds one full episode: 9
/// warm-up inputs (the logged context, loss mask 0) followed by the 81
/// controlled steps. Per update the batch rolls once as logged trajectories
/// for the BC term - the ego follows the discretized expert, re-aimed at the
/// log every step, and the expert's action indices are the targets - and
/// once as simulated trajectories for the PPO term, with sampled policy
/// actions and recorded rewards. Both rollouts are observed under the
/// imitator's constraint. Writes log.csv and periodic ckpt_<update>.bin
/// files into out_dir and returns the final checkpoint; segment_len in
/// TrainConfig is ignored (episodes have a fixed length). The mean_reward,
/// overlap_rate and offroad_rate columns come from greedy rollouts on the
/// leading eval_probes corpus scenarios every eval_every updates; the rates
/// are any-event fractions in [0, 1]. Throws on a non-finite loss after
/// dumping the offending snapshot.
Checkpoint train_driving(const TrainConfig& cfg, const DrivingTrainOptions& opt,
                         const std::vector<Scenario>& corpus, const std::string& out_dir);

}  // namespace gaplab
