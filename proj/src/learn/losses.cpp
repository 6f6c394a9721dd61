#include "gaplab/learn/losses.hpp"

#include <cmath>

#include "gaplab/common/error.hpp"

namespace gaplab {

void TrainConfig::validate() const {
  require(w_bc >= 0.0 && w_rl >= 0.0, "train config: loss weights must be >= 0");
  require(w_bc > 0.0 || w_rl > 0.0, "train config: at least one loss weight must be positive");
  require(gamma > 0.0 && gamma <= 1.0, "train config: gamma must lie in (0, 1]");
  require(gae_lambda >= 0.0 && gae_lambda <= 1.0, "train config: lambda must lie in [0, 1]");
  require(ppo_clip > 0.0, "train config: clip must be positive");
  require(value_coef >= 0.0 && entropy_coef >= 0.0, "train config: coefficients must be >= 0");
  require(lanes > 0 && segment_len > 0, "train config: batch sizes must be positive");
  require(total_updates > 0, "train config: total_updates must be positive");
  require(lr_max > 0.0, "train config: lr_max must be positive");
  require(checkpoint_every > 0, "train config: checkpoint_every must be positive");
}

namespace {

// Forward the whole buffer on the tape, zeroing the recurrent state after
// done steps exactly like collection did.
std::vector<TapedPolicy::StepOut> unroll(Tape& t, const TapedPolicy& policy,
                                         const NetConfig& net, const RolloutBuffer& buf) {
  std::vector<TapedPolicy::StepOut> outs;
  outs.reserve(static_cast<std::size_t>(buf.steps));
  Var hidden = t.constant(buf.initial_hidden.rows != 0 ? buf.initial_hidden
                                                       : Matrix(buf.batch, net.rnn_hidden));
  for (int s = 0; s < buf.steps; ++s) {
    const TapedPolicy::StepOut out =
        net.encoder == EncoderKind::kFlat
            ? policy.step_flat(t, t.constant(buf.features[static_cast<std::size_t>(s)]), hidden)
            : policy.step_scene(t, buf.scenes[static_cast<std::size_t>(s)], hidden);
    outs.push_back(out);
    if (s + 1 < buf.steps) {
      Matrix live(buf.batch, 1);
      for (int b = 0; b < buf.batch; ++b)
        live.at(b, 0) = 1.0 - buf.dones[static_cast<std::size_t>(s) * buf.batch + b];
      hidden = mul_rows(t, out.hidden, t.constant(std::move(live)));
    }
  }
  return outs;
}

Matrix column(const std::vector<double>& flat, int step, int batch) {
  Matrix col(batch, 1);
  for (int b = 0; b < batch; ++b) col.at(b, 0) = flat[static_cast<std::size_t>(step) * batch + b];
  return col;
}

std::vector<int> action_row(const RolloutBuffer& buf, int step) {
  const auto base = static_cast<std::size_t>(step) * buf.batch;
  return std::vector<int>(buf.actions.begin() + static_cast<std::ptrdiff_t>(base),
                          buf.actions.begin() + static_cast<std::ptrdiff_t>(base + buf.batch));
}

Var accumulate(Tape& t, Var acc, Var term, bool first) {
  return first ? term : add(t, acc, term);
}

Var scaled(Tape& t, Var v, double w) { return w == 1.0 ? v : affine(t, v, w, 0.0); }

}  // namespace

Var bc_loss_graph(Tape& t, const TapedPolicy& policy, const NetConfig& net,
                  const RolloutBuffer& logged) {
  logged.validate(net);
  const int n = logged.masked_count();
  require(n > 0, "bc loss: buffer has no loss-bearing steps");
  const auto outs = unroll(t, policy, net, logged);
  Var acc = -1;
  for (int s = 0; s < logged.steps; ++s) {
    const Var lp = log_softmax_rows(t, outs[static_cast<std::size_t>(s)].logits);
    const Var picked = pick_cols(t, lp, action_row(logged, s));
    const Var masked = mul_rows(t, picked, t.constant(column(logged.mask, s, logged.batch)));
    acc = accumulate(t, acc, vsum(t, masked), s == 0);
  }
  return affine(t, acc, -1.0 / n, 0.0);
}

double bc_loss(const NetConfig& net, const Params& params, const RolloutBuffer& logged) {
  Tape t;
  const TapedPolicy policy(t, net, params);
  return t.value(bc_loss_graph(t, policy, net, logged)).at(0, 0);
}

Var ppo_loss_graph(Tape& t, const TapedPolicy& policy, const NetConfig& net,
                   const RolloutBuffer& sim, const std::vector<double>& advantages,
                   const std::vector<double>& returns, const TrainConfig& cfg) {
  sim.validate(net);
  require(sim.simulated, "ppo loss: needs a simulated buffer");
  require(advantages.size() == sim.flat_size() && returns.size() == sim.flat_size(),
          "ppo loss: advantage/return lengths disagree with the buffer");
  const int n = sim.masked_count();
  require(n > 0, "ppo loss: buffer has no loss-bearing steps");
  const std::vector<double> adv = normalize_advantages(advantages, sim.mask);

  const auto outs = unroll(t, policy, net, sim);
  Var policy_acc = -1, value_acc = -1, ent_acc = -1;
  for (int s = 0; s < sim.steps; ++s) {
    const auto& out = outs[static_cast<std::size_t>(s)];
    const Var lp = log_softmax_rows(t, out.logits);
    const Var picked = pick_cols(t, lp, action_row(sim, s));

    Matrix old_lp(sim.batch, 1);
    const Matrix& snap = sim.logits[static_cast<std::size_t>(s)];
    for (int b = 0; b < sim.batch; ++b)
      old_lp.at(b, 0) =
          action_log_prob(snap, b, sim.actions[static_cast<std::size_t>(s) * sim.batch + b]);
    const Var ratio = vexp(t, sub(t, picked, t.constant(std::move(old_lp))));
    for (double rv : t.value(ratio).data)
      require(std::isfinite(rv), "ppo loss: non-finite probability ratio");

    const Var adv_col = t.constant(column(adv, s, sim.batch));
    const Var surr = min_elem(t, mul(t, ratio, adv_col),
                              mul(t, clamp(t, ratio, 1.0 - cfg.ppo_clip, 1.0 + cfg.ppo_clip),
                                  adv_col));
    policy_acc = accumulate(t, policy_acc, vsum(t, surr), s == 0);

    const Var diff = sub(t, out.value, t.constant(column(returns, s, sim.batch)));
    const Var sq = mul_rows(t, mul(t, diff, diff), t.constant(column(sim.mask, s, sim.batch)));
    value_acc = accumulate(t, value_acc, vsum(t, sq), s == 0);

    const Var plogp = mul_rows(t, mul(t, vexp(t, lp), lp),
                               t.constant(column(sim.mask, s, sim.batch)));
    ent_acc = accumulate(t, ent_acc, vsum(t, plogp), s == 0);
  }
  const Var policy_term = affine(t, policy_acc, -1.0 / n, 0.0);
  const Var value_term = affine(t, value_acc, cfg.value_coef / n, 0.0);
  // Entropy enters the loss as -entropy_coef * H = +entropy_coef * sum(p log p) / n.
  const Var ent_term = affine(t, ent_acc, cfg.entropy_coef / n, 0.0);
  return add(t, add(t, policy_term, value_term), ent_term);
}

double ppo_loss(const NetConfig& net, const Params& params, const RolloutBuffer& sim,
                const std::vector<double>& advantages, const std::vector<double>& returns,
                const TrainConfig& cfg) {
  Tape t;
  const TapedPolicy policy(t, net, params);
  return t.value(ppo_loss_graph(t, policy, net, sim, advantages, returns, cfg)).at(0, 0);
}

namespace {

void apply_step(Params& params, Adam& opt, const TapedPolicy& policy, Tape& t, Var total) {
  t.backward(total);
  const std::vector<double> grads = policy.grad_flat(t);
  std::vector<double> flat = params.flatten();
  opt.step(flat, grads);
  params.unflatten(flat);
}

}  // namespace

UpdateDiagnostics combined_update(const NetConfig& net, Params& params, Adam& opt,
                                  const RolloutBuffer* logged, const RolloutBuffer* sim,
                                  const TrainConfig& cfg) {
  cfg.validate();
  Tape t;
  const TapedPolicy policy(t, net, params);
  UpdateDiagnostics diag;
  Var total = -1;
  bool have_total = false;
  if (cfg.w_bc > 0.0) {
    require(logged != nullptr, "combined update: BC weight is positive but no logged buffer");
    const Var l = bc_loss_graph(t, policy, net, *logged);
    diag.bc_loss = t.value(l).at(0, 0);
    total = scaled(t, l, cfg.w_bc);
    have_total = true;
  }
  if (cfg.w_rl > 0.0) {
    require(sim != nullptr, "combined update: RL weight is positive but no simulated buffer");
    const GaeResult gae = gae_advantages(*sim, cfg.gamma, cfg.gae_lambda);
    const Var l = ppo_loss_graph(t, policy, net, *sim, gae.advantages, gae.returns, cfg);
    diag.rl_loss = t.value(l).at(0, 0);
    const Var term = scaled(t, l, cfg.w_rl);
    total = have_total ? add(t, total, term) : term;
    have_total = true;
  }
  diag.combined_loss = t.value(total).at(0, 0);
  apply_step(params, opt, policy, t, total);
  return diag;
}

UpdateDiagnostics bc_update(const NetConfig& net, Params& params, Adam& opt,
                            const RolloutBuffer& logged, const TrainConfig& cfg) {
  Tape t;
  const TapedPolicy policy(t, net, params);
  const Var l = bc_loss_graph(t, policy, net, logged);
  UpdateDiagnostics diag;
  diag.bc_loss = t.value(l).at(0, 0);
  const Var total = scaled(t, l, cfg.w_bc);
  diag.combined_loss = t.value(total).at(0, 0);
  apply_step(params, opt, policy, t, total);
  return diag;
}

UpdateDiagnostics ppo_update(const NetConfig& net, Params& params, Adam& opt,
                             const RolloutBuffer& sim, const TrainConfig& cfg) {
  Tape t;
  const TapedPolicy policy(t, net, params);
  const GaeResult gae = gae_advantages(sim, cfg.gamma, cfg.gae_lambda);
  const Var l = ppo_loss_graph(t, policy, net, sim, gae.advantages, gae.returns, cfg);
  UpdateDiagnostics diag;
  diag.rl_loss = t.value(l).at(0, 0);
  const Var total = scaled(t, l, cfg.w_rl);
  diag.combined_loss = t.value(total).at(0, 0);
  apply_step(params, opt, policy, t, total);
  return diag;
}

}  // namespace gaplab
