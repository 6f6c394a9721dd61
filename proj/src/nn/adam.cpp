#include "gaplab/nn/adam.hpp"

#include <cmath>

#include "gaplab/common/error.hpp"
#include "gaplab/core/types.hpp"

namespace gaplab {

Adam::Adam(AdamConfig cfg, std::size_t n_params)
    : cfg_(cfg), m_(n_params, 0.0), v_(n_params, 0.0) {
  require(cfg_.total_steps > 0, "adam: total_steps must be positive");
  require(cfg_.lr_max > 0.0, "adam: lr_max must be positive");
}

double Adam::lr() const {
  const double frac = std::min(1.0, static_cast<double>(t_) / cfg_.total_steps);
  return 0.5 * cfg_.lr_max * (1.0 + std::cos(kPi * frac));
}

void Adam::step(std::vector<double>& params, const std::vector<double>& grads) {
  require(params.size() == m_.size() && grads.size() == m_.size(),
          "adam: parameter/gradient size mismatch");
  for (double g : grads)
    require(std::isfinite(g), "adam: non-finite gradient");
  const double alpha = lr();
  t_ += 1;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grads[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grads[i] * grads[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= alpha * mhat / (std::sqrt(vhat) + cfg_.eps);
  }
}

}  // namespace gaplab
