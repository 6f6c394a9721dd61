#pragma once

#include <cstddef>
#include <vector>

namespace gaplab {

struct AdamConfig {
  double lr_max = 1e-3;
  int total_steps = 1;  // cosine horizon T
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction and a cosine-decayed learning rate
/// lr(t) = 0.5 * lr_max * (1 + cos(pi * t / T)), evaluated at the current
/// step count t (0 on the first step, so training starts at lr_max and
/// anneals to 0 at t = T).
class Adam {
 public:
  Adam(AdamConfig cfg, std::size_t n_params);

  double lr() const;
  int step_count() const { return t_; }

  /// In-place update; throws on non-finite gradients (fail fast, no
  /// clipping).
  void step(std::vector<double>& params, const std::vector<double>& grads);

 private:
  AdamConfig cfg_;
  std::vector<double> m_;
  std::vector<double> v_;
  int t_ = 0;
};

}  // namespace gaplab
