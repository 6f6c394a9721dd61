#include "gaplab/learn/rollout.hpp"

#include <cmath>

#include "gaplab/common/error.hpp"
#include "gaplab/common/stats.hpp"

namespace gaplab {

int RolloutBuffer::masked_count() const {
  int n = 0;
  for (double m : mask) n += m != 0.0 ? 1 : 0;
  return n;
}

void RolloutBuffer::validate(const NetConfig& net) const {
  require(batch > 0 && steps > 0, "rollout: empty buffer");
  const std::size_t n = flat_size();
  const std::size_t t = static_cast<std::size_t>(steps);
  if (net.encoder == EncoderKind::kFlat) {
    require(features.size() == t, "rollout: feature step count mismatch");
    for (const Matrix& f : features)
      require(f.rows == batch && f.cols == net.flat_dim, "rollout: feature shape mismatch");
  } else {
    require(scenes.size() == t, "rollout: scene step count mismatch");
    for (const SceneBatch& s : scenes)
      require(s.batch == batch, "rollout: scene batch mismatch");
  }
  if (initial_hidden.rows != 0)
    require(initial_hidden.rows == batch && initial_hidden.cols == net.rnn_hidden,
            "rollout: initial hidden shape mismatch");
  require(actions.size() == n, "rollout: action count mismatch");
  require(logits.size() == t, "rollout: logit snapshot count mismatch");
  for (const Matrix& l : logits)
    require(l.rows == batch && l.cols == net.actions, "rollout: logit shape mismatch");
  require(values.size() == n, "rollout: value count mismatch");
  require(dones.size() == n, "rollout: done flag count mismatch");
  require(mask.size() == n, "rollout: mask count mismatch");
  for (int a : actions) require(a >= 0 && a < net.actions, "rollout: action index out of range");
  if (simulated) {
    require(rewards.size() == n, "rollout: reward count mismatch");
    require(bootstrap.size() == static_cast<std::size_t>(batch),
            "rollout: bootstrap count mismatch");
  } else {
    require(rewards.empty(), "rollout: logged buffers carry no rewards");
  }
}

GaeResult gae_advantages(const RolloutBuffer& buffer, double gamma, double lambda) {
  require(buffer.simulated, "gae: rewards live only on simulated buffers");
  const std::size_t n = buffer.flat_size();
  require(buffer.rewards.size() == n && buffer.values.size() == n && buffer.dones.size() == n,
          "gae: reward/value/done lengths disagree");
  require(buffer.bootstrap.size() == static_cast<std::size_t>(buffer.batch),
          "gae: bootstrap length disagrees with the lane count");
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  for (int b = 0; b < buffer.batch; ++b) {
    double next_adv = 0.0;
    double next_value = buffer.bootstrap[static_cast<std::size_t>(b)];
    for (int t = buffer.steps - 1; t >= 0; --t) {
      const std::size_t i = static_cast<std::size_t>(t) * buffer.batch + b;
      const double live = 1.0 - buffer.dones[i];
      const double delta =
          buffer.rewards[i] + gamma * next_value * live - buffer.values[i];
      next_adv = delta + gamma * lambda * live * next_adv;
      out.advantages[i] = next_adv;
      out.returns[i] = next_adv + buffer.values[i];
      next_value = buffer.values[i];
    }
  }
  return out;
}

std::vector<double> normalize_advantages(const std::vector<double>& advantages,
                                         const std::vector<double>& mask) {
  require(advantages.size() == mask.size(), "normalize: advantage/mask lengths disagree");
  std::vector<double> selected;
  selected.reserve(advantages.size());
  for (std::size_t i = 0; i < advantages.size(); ++i)
    if (mask[i] != 0.0) selected.push_back(advantages[i]);
  require(!selected.empty(), "normalize: no masked-in advantages");
  const double mean = stats::mean(selected);
  const double sd = selected.size() > 1 ? stats::sample_std(selected) : 0.0;
  std::vector<double> out(advantages.size(), 0.0);
  for (std::size_t i = 0; i < advantages.size(); ++i)
    if (mask[i] != 0.0) out[i] = (advantages[i] - mean) / (sd + 1e-8);
  return out;
}

}  // namespace gaplab
