#pragma once

#include <vector>

#include "gaplab/nn/policy.hpp"

namespace gaplab {

/// Fixed-shape rollout storage: `steps` timesteps across `batch` parallel
/// lanes, flattened lane-major (entry t * batch + b). Lanes may chain several
/// episodes; `dones` marks the steps after which the recurrent state is
/// zeroed. `mask` selects the steps that contribute to losses (context
/// warm-up and padding carry mask 0). Logged buffers store expert action
/// indices and no rewards; simulated buffers store sampled actions, rewards
/// and a bootstrap value per lane for the state following the last step.
struct RolloutBuffer {
  int batch = 0;
  int steps = 0;
  bool simulated = false;

  Matrix initial_hidden;           // [batch x rnn_hidden]; empty means zeros
  std::vector<Matrix> features;    // flat encoder: per-step [batch x flat_dim]
  std::vector<SceneBatch> scenes;  // scene encoder: per-step inputs
  std::vector<int> actions;
  std::vector<Matrix> logits;  // per-step [batch x actions] snapshots
  std::vector<double> values;
  std::vector<double> rewards;
  std::vector<double> dones;
  std::vector<double> mask;
  std::vector<double> bootstrap;  // [batch]

  std::size_t flat_size() const {
    return static_cast<std::size_t>(steps) * static_cast<std::size_t>(batch);
  }
  int masked_count() const;
  void validate(const NetConfig& net) const;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

/// GAE(lambda) over every lane, cutting the recursion and the bootstrap at
/// done steps; returns = advantages + values.
GaeResult gae_advantages(const RolloutBuffer& buffer, double gamma, double lambda);

/// (a - mean) / (std + 1e-8) over the mask-selected entries; masked-out
/// entries come back as zero. Sample standard deviation; a single selected
/// entry normalizes to zero.
std::vector<double> normalize_advantages(const std::vector<double>& advantages,
                                         const std::vector<double>& mask);

}  // namespace gaplab
