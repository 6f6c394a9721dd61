#pragma once

#include <cstdint>

#include "gaplab/learn/rollout.hpp"
#include "gaplab/nn/adam.hpp"
#include "gaplab/nn/policy.hpp"
#include "gaplab/nn/tape.hpp"

namespace gaplab {

struct TrainConfig {
  double w_bc = 1.0;
  double w_rl = 0.05;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double ppo_clip = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  int lanes = 16;         // parallel env copies per update
  int segment_len = 128;  // steps collected per lane per update
  int total_updates = 500;
  double lr_max = 1e-3;
  int checkpoint_every = 100;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Mean negative log-likelihood of the buffer's (expert) actions under the
/// policy, over mask-selected steps, with the recurrent state threaded
/// through the whole lane (masked warm-up steps still advance it).
Var bc_loss_graph(Tape& t, const TapedPolicy& policy, const NetConfig& net,
                  const RolloutBuffer& logged);
double bc_loss(const NetConfig& net, const Params& params, const RolloutBuffer& logged);

/// Clipped-surrogate PPO loss: policy term + value_coef * value MSE
/// - entropy_coef * entropy, over mask-selected steps. Advantages are
/// normalized internally (mean 0, std 1, eps 1e-8) across the masked batch.
/// Throws when a probability ratio comes out non-finite.
Var ppo_loss_graph(Tape& t, const TapedPolicy& policy, const NetConfig& net,
                   const RolloutBuffer& sim, const std::vector<double>& advantages,
                   const std::vector<double>& returns, const TrainConfig& cfg);
double ppo_loss(const NetConfig& net, const Params& params, const RolloutBuffer& sim,
                const std::vector<double>& advantages, const std::vector<double>& returns,
                const TrainConfig& cfg);

struct UpdateDiagnostics {
  double bc_loss = 0.0;
  double rl_loss = 0.0;
  double combined_loss = 0.0;
};

/// One Adam step on w_bc * bc_loss + w_rl * ppo_loss. A zero weight skips
/// building that branch entirely, so the degenerate configurations reproduce
/// the single-objective updates bit for bit; the matching buffer may then be
/// null. GAE runs internally on the simulated buffer.
UpdateDiagnostics combined_update(const NetConfig& net, Params& params, Adam& opt,
                                  const RolloutBuffer* logged, const RolloutBuffer* sim,
                                  const TrainConfig& cfg);

/// Single-objective updates; these are the graphs the zero-weight
/// configurations of combined_update must reproduce exactly.
UpdateDiagnostics bc_update(const NetConfig& net, Params& params, Adam& opt,
                            const RolloutBuffer& logged, const TrainConfig& cfg);
UpdateDiagnostics ppo_update(const NetConfig& net, Params& params, Adam& opt,
                             const RolloutBuffer& sim, const TrainConfig& cfg);

}  // namespace gaplab
