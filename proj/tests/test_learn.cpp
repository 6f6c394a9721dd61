#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "gaplab/common/error.hpp"
#include "gaplab/common/rng.hpp"
#include "gaplab/common/stats.hpp"
#include "gaplab/learn/discretizer.hpp"
#include "gaplab/learn/losses.hpp"
#include "gaplab/learn/rollout.hpp"

using namespace gaplab;

namespace {

Matrix rand_mat(int rows, int cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data) v = rng.uniform(lo, hi);
  return m;
}

NetConfig tiny_flat_net() {
  NetConfig net;
  net.encoder = EncoderKind::kFlat;
  net.flat_dim = 4;
  net.enc_hidden = 5;
  net.embed_dim = 5;
  net.rnn_hidden = 5;
  net.value_hidden = 4;
  net.actions = 6;
  return net;
}

// Rolls a synthetic flat-feature environment with the exact arithmetic the
// loss graphs replay: forward, then scale the hidden rows by (1 - done).
RolloutBuffer collect_flat(const NetConfig& net, const Params& p, int batch, int steps,
                           bool simulated, int warmup, double done_prob, Rng& rng) {
  RolloutBuffer buf;
  buf.batch = batch;
  buf.steps = steps;
  buf.simulated = simulated;
  Matrix hidden(batch, net.rnn_hidden);
  for (int s = 0; s < steps; ++s) {
    const Matrix feats = rand_mat(batch, net.flat_dim, rng);
    const ForwardOut out = forward_flat(net, p, feats, hidden);
    buf.features.push_back(feats);
    buf.logits.push_back(out.logits);
    hidden = out.hidden;
    for (int b = 0; b < batch; ++b) {
      const bool in_warmup = s < warmup;
      buf.actions.push_back(in_warmup ? 0 : sample_action(out.logits, b, rng));
      buf.values.push_back(out.value.at(b, 0));
      const double done = (!in_warmup && rng.uniform() < done_prob) ? 1.0 : 0.0;
      buf.dones.push_back(done);
      buf.mask.push_back(in_warmup ? 0.0 : 1.0);
      if (simulated) buf.rewards.push_back(rng.uniform(-1.0, 0.0));
      const double live = 1.0 - done;
      for (int j = 0; j < net.rnn_hidden; ++j) hidden.at(b, j) *= live;
    }
  }
  if (simulated) buf.bootstrap.assign(static_cast<std::size_t>(batch), 0.0);
  return buf;
}

// Definition-expanded GAE for one lane: independent of the production
// recursion on purpose.
std::vector<double> brute_force_gae(const std::vector<double>& rewards,
                                    const std::vector<double>& values,
                                    const std::vector<double>& dones, double bootstrap,
                                    double gamma, double lambda) {
  const int n = static_cast<int>(rewards.size());
  std::vector<double> adv(static_cast<std::size_t>(n), 0.0);
  for (int t = 0; t < n; ++t) {
    double acc = 0.0;
    double weight = 1.0;
    for (int k = t; k < n; ++k) {
      const double next_value = k + 1 < n ? values[static_cast<std::size_t>(k + 1)] : bootstrap;
      const double live = 1.0 - dones[static_cast<std::size_t>(k)];
      const double delta =
          rewards[static_cast<std::size_t>(k)] + gamma * next_value * live -
          values[static_cast<std::size_t>(k)];
      acc += weight * delta;
      if (live == 0.0) break;
      weight *= gamma * lambda;
    }
    adv[static_cast<std::size_t>(t)] = acc;
  }
  return adv;
}

}  // namespace

TEST_CASE("discretizer: index round-trip over the whole vocabulary") {
  const ActionDiscretizer d;
  CHECK(d.actions() == 256);
  for (int i = 0; i < 256; ++i) {
    const DeltaAction a = d.undiscretize(i);
    CHECK(d.discretize(a) == i);
    // Idempotence on centers, bitwise.
    const DeltaAction again = d.undiscretize(d.discretize(a));
    CHECK(again.dx == a.dx);
    CHECK(again.dy == a.dy);
    CHECK(again.dtheta == a.dtheta);
  }
  CHECK_THROWS(d.undiscretize(-1));
  CHECK_THROWS(d.undiscretize(256));
}

TEST_CASE("discretizer: the zero action sits exactly on a bin center") {
  const ActionDiscretizer d;
  const DeltaAction zero{0.0, 0.0, 0.0};
  const DeltaAction back = d.undiscretize(d.discretize(zero));
  CHECK(back.dx == 0.0);
  CHECK(back.dy == 0.0);
  CHECK(back.dtheta == 0.0);
}

TEST_CASE("discretizer: nearest-center mapping and boundary clamping") {
  const ActionDiscretizer d;
  // dx bins are 0.25 wide with centers ..., 0.0, 0.25, ...; 0.1 is nearer 0.
  CHECK(d.undiscretize(d.discretize({0.1, 0.0, 0.0})).dx == 0.0);
  CHECK(d.undiscretize(d.discretize({0.13, 0.0, 0.0})).dx == 0.25);
  bool saturated = true;
  d.discretize({0.1, 0.0, 0.0}, &saturated);
  CHECK_FALSE(saturated);
  CHECK(d.undiscretize(d.discretize({99.0, 0.0, 0.0}, &saturated)).dx == doctest::Approx(1.25));
  CHECK(saturated);
  CHECK(d.undiscretize(d.discretize({-99.0, 0.0, 0.0}, &saturated)).dx == doctest::Approx(-0.5));
  CHECK(saturated);
  // Range edges are in range.
  d.discretize({1.375, -0.28125, 0.15625}, &saturated);
  CHECK_FALSE(saturated);
  CHECK_THROWS(ActionDiscretizer(AxisGrid{1.0, 0.0, 8}, AxisGrid{0, 1, 8}, AxisGrid{0, 1, 4}));
  CHECK_THROWS(ActionDiscretizer(AxisGrid{0.0, 1.0, 0}, AxisGrid{0, 1, 8}, AxisGrid{0, 1, 4}));
}

TEST_CASE("gae: zero rewards and values give zero advantages") {
  RolloutBuffer buf;
  buf.batch = 2;
  buf.steps = 4;
  buf.simulated = true;
  buf.rewards.assign(8, 0.0);
  buf.values.assign(8, 0.0);
  buf.dones.assign(8, 0.0);
  buf.mask.assign(8, 1.0);
  buf.bootstrap.assign(2, 0.0);
  const GaeResult g = gae_advantages(buf, 0.99, 0.95);
  for (double a : g.advantages) CHECK(a == 0.0);
  for (double r : g.returns) CHECK(r == 0.0);
}

TEST_CASE("gae: gamma=1, lambda=1, zero values telescopes to reward-to-go") {
  RolloutBuffer buf;
  buf.batch = 1;
  buf.steps = 4;
  buf.simulated = true;
  buf.rewards = {1.0, 2.0, 3.0, 4.0};
  buf.values.assign(4, 0.0);
  buf.dones.assign(4, 0.0);
  buf.mask.assign(4, 1.0);
  buf.bootstrap = {0.0};
  const GaeResult g = gae_advantages(buf, 1.0, 1.0);
  CHECK(g.advantages[0] == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(g.advantages[1] == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(g.advantages[2] == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(g.advantages[3] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("gae: matches the brute-force definition exhaustively up to length 8") {
  Rng rng(100);
  for (int len = 1; len <= 8; ++len) {
    // All done patterns for short lanes, random draws of everything else.
    const int patterns = 1 << len;
    for (int pat = 0; pat < patterns; ++pat) {
      RolloutBuffer buf;
      buf.batch = 1;
      buf.steps = len;
      buf.simulated = true;
      for (int t = 0; t < len; ++t) {
        buf.rewards.push_back(rng.uniform(-2.0, 2.0));
        buf.values.push_back(rng.uniform(-2.0, 2.0));
        buf.dones.push_back((pat >> t) & 1 ? 1.0 : 0.0);
        buf.mask.push_back(1.0);
      }
      buf.bootstrap = {rng.uniform(-2.0, 2.0)};
      const double gamma = rng.uniform(0.8, 1.0);
      const double lambda = rng.uniform(0.8, 1.0);
      const GaeResult g = gae_advantages(buf, gamma, lambda);
      const auto expected =
          brute_force_gae(buf.rewards, buf.values, buf.dones, buf.bootstrap[0], gamma, lambda);
      for (int t = 0; t < len; ++t) {
        CHECK(std::abs(g.advantages[static_cast<std::size_t>(t)] -
                       expected[static_cast<std::size_t>(t)]) <= 1e-10);
        CHECK(std::abs(g.returns[static_cast<std::size_t>(t)] -
                       (expected[static_cast<std::size_t>(t)] +
                        buf.values[static_cast<std::size_t>(t)])) <= 1e-10);
      }
    }
  }
}

TEST_CASE("gae: multi-lane buffers keep lanes independent") {
  Rng rng(101);
  RolloutBuffer wide;
  wide.batch = 3;
  wide.steps = 6;
  wide.simulated = true;
  for (int t = 0; t < 6; ++t)
    for (int b = 0; b < 3; ++b) {
      wide.rewards.push_back(rng.uniform(-1.0, 1.0));
      wide.values.push_back(rng.uniform(-1.0, 1.0));
      wide.dones.push_back(rng.uniform() < 0.25 ? 1.0 : 0.0);
      wide.mask.push_back(1.0);
    }
  wide.bootstrap = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  const GaeResult g = gae_advantages(wide, 0.97, 0.9);
  for (int b = 0; b < 3; ++b) {
    RolloutBuffer lane;
    lane.batch = 1;
    lane.steps = 6;
    lane.simulated = true;
    for (int t = 0; t < 6; ++t) {
      lane.rewards.push_back(wide.rewards[static_cast<std::size_t>(t) * 3 + b]);
      lane.values.push_back(wide.values[static_cast<std::size_t>(t) * 3 + b]);
      lane.dones.push_back(wide.dones[static_cast<std::size_t>(t) * 3 + b]);
      lane.mask.push_back(1.0);
    }
    lane.bootstrap = {wide.bootstrap[static_cast<std::size_t>(b)]};
    const GaeResult gl = gae_advantages(lane, 0.97, 0.9);
    for (int t = 0; t < 6; ++t)
      CHECK(g.advantages[static_cast<std::size_t>(t) * 3 + b] ==
            gl.advantages[static_cast<std::size_t>(t)]);
  }

  RolloutBuffer logged;
  logged.batch = 1;
  logged.steps = 2;
  logged.simulated = false;
  CHECK_THROWS(gae_advantages(logged, 0.99, 0.95));
}

TEST_CASE("normalize_advantages: masked mean zero, std one") {
  Rng rng(102);
  std::vector<double> adv, mask;
  for (int i = 0; i < 64; ++i) {
    adv.push_back(rng.uniform(-3.0, 5.0));
    mask.push_back(i % 4 == 0 ? 0.0 : 1.0);
  }
  const auto out = normalize_advantages(adv, mask);
  std::vector<double> selected;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mask[i] == 0.0) {
      CHECK(out[i] == 0.0);
    } else {
      selected.push_back(out[i]);
    }
  }
  CHECK(std::abs(stats::mean(selected)) < 1e-9);
  CHECK(std::abs(stats::sample_std(selected) - 1.0) < 1e-6);

  const auto flat = normalize_advantages({2.5, 2.5, 2.5}, {1, 1, 1});
  for (double v : flat) CHECK(v == 0.0);
  const auto single = normalize_advantages({7.0, 1.0}, {0, 1});
  CHECK(single[1] == 0.0);
}

TEST_CASE("bc_loss: uniform policy scores ln(actions)") {
  const NetConfig net = tiny_flat_net();
  Rng rng(103);
  Params p = init_policy_params(net, rng);
  for (double& v : p.get("act.w").data) v = 0.0;
  for (double& v : p.get("act.b").data) v = 0.0;
  const RolloutBuffer buf = collect_flat(net, p, 2, 5, false, 0, 0.2, rng);
  CHECK(bc_loss(net, p, buf) == doctest::Approx(std::log(6.0)).epsilon(1e-12));
}

TEST_CASE("bc_loss: near-deterministic expert-matching policy scores near zero") {
  const NetConfig net = tiny_flat_net();
  Rng rng(104);
  Params p = init_policy_params(net, rng);
  for (double& v : p.get("act.w").data) v = 0.0;
  for (double& v : p.get("act.b").data) v = 0.0;
  p.get("act.b").at(0, 3) = 30.0;
  RolloutBuffer buf = collect_flat(net, p, 2, 4, false, 0, 0.0, rng);
  for (int& a : buf.actions) a = 3;
  CHECK(bc_loss(net, p, buf) < 1e-9);
  CHECK(bc_loss(net, p, buf) >= 0.0);
}

TEST_CASE("bc_loss: masked steps carry no loss but still advance the recurrent state") {
  const NetConfig net = tiny_flat_net();
  Rng rng(105);
  const Params p = init_policy_params(net, rng);
  const RolloutBuffer buf = collect_flat(net, p, 2, 6, false, 2, 0.1, rng);
  const double base = bc_loss(net, p, buf);

  RolloutBuffer other_actions = buf;
  other_actions.actions[0] = 5;
  other_actions.actions[1] = 4;  // warm-up entries, mask 0
  CHECK(bc_loss(net, p, other_actions) == base);

  RolloutBuffer other_feats = buf;
  other_feats.features[0].at(0, 0) += 0.5;  // warm-up observation feeds the RNN
  CHECK(bc_loss(net, p, other_feats) != base);

  RolloutBuffer all_masked = buf;
  for (double& m : all_masked.mask) m = 0.0;
  CHECK_THROWS(bc_loss(net, p, all_masked));

  RolloutBuffer with_rewards = buf;
  with_rewards.rewards.assign(with_rewards.flat_size(), 0.0);
  CHECK_THROWS(bc_loss(net, p, with_rewards));
}

TEST_CASE("bc_loss: gradient matches finite differences on a toy trajectory") {
  const NetConfig net = tiny_flat_net();
  Rng rng(106);
  Params p = init_policy_params(net, rng);
  const RolloutBuffer buf = collect_flat(net, p, 2, 3, false, 1, 0.3, rng);

  Tape t;
  const TapedPolicy policy(t, net, p);
  t.backward(bc_loss_graph(t, policy, net, buf));
  const std::vector<double> analytic = policy.grad_flat(t);

  std::vector<double> flat = p.flatten();
  REQUIRE(analytic.size() == flat.size());
  Params scratch = p;
  const double h = 1e-5;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double orig = flat[i];
    flat[i] = orig + h;
    scratch.unflatten(flat);
    const double fp = bc_loss(net, scratch, buf);
    flat[i] = orig - h;
    scratch.unflatten(flat);
    const double fm = bc_loss(net, scratch, buf);
    flat[i] = orig;
    const double numeric = (fp - fm) / (2.0 * h);
    const double rel =
        std::abs(analytic[i] - numeric) / std::max({std::abs(analytic[i]), std::abs(numeric), 1e-4});
    INFO("param " << i << ": analytic " << analytic[i] << " numeric " << numeric);
    CHECK(rel <= 1e-4);
  }
}

TEST_CASE("ppo_loss: fresh buffer keeps ratios at one and the clip inactive") {
  const NetConfig net = tiny_flat_net();
  Rng rng(107);
  const Params p = init_policy_params(net, rng);
  RolloutBuffer buf = collect_flat(net, p, 3, 5, true, 1, 0.2, rng);

  TrainConfig cfg;
  cfg.value_coef = 0.0;
  cfg.entropy_coef = 0.0;
  const GaeResult gae = gae_advantages(buf, cfg.gamma, cfg.gae_lambda);
  const double loss = ppo_loss(net, p, buf, gae.advantages, gae.returns, cfg);

  const auto norm = normalize_advantages(gae.advantages, buf.mask);
  double expected = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < norm.size(); ++i) {
    if (buf.mask[i] != 0.0) {
      expected -= norm[i];
      ++n;
    }
  }
  expected /= n;
  CHECK(loss == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ppo_loss: all-equal advantages zero out the policy term") {
  const NetConfig net = tiny_flat_net();
  Rng rng(108);
  const Params p = init_policy_params(net, rng);
  const RolloutBuffer buf = collect_flat(net, p, 2, 4, true, 0, 0.0, rng);
  TrainConfig cfg;
  cfg.value_coef = 0.0;
  cfg.entropy_coef = 0.0;
  // 1.5 is exactly representable, so the masked mean is exact and every
  // normalized advantage is a true zero.
  const std::vector<double> adv(buf.flat_size(), 1.5);
  const std::vector<double> ret(buf.flat_size(), 0.0);
  CHECK(ppo_loss(net, p, buf, adv, ret, cfg) == 0.0);
}

TEST_CASE("ppo_loss: hand-worked clip activation") {
  const NetConfig net = tiny_flat_net();
  Rng rng(109);
  const Params p = init_policy_params(net, rng);
  // One step, two lanes; snapshots doctored so lane 0 has ratio 1.5 and
  // lane 1 ratio 1 under the unchanged parameters.
  RolloutBuffer buf = collect_flat(net, p, 2, 1, true, 0, 0.0, rng);
  const int a0 = buf.actions[0];
  // Shifting the taken logit by -ln(1.5) shifts its log-prob by almost the
  // same amount; solve exactly instead: new_lp - old_lp = ln(1.5) requires
  // old_lp = new_lp - ln(1.5). Build the snapshot row to produce that.
  const double new_lp = action_log_prob(buf.logits[0], 0, a0);
  const double target_old = new_lp - std::log(1.5);
  // Row with logit x on a0 and 0 elsewhere: lp(a0) = x - log(exp(x) + 5).
  // Solve x: exp(x)/(exp(x)+5) = exp(target_old) =: q  =>  x = log(5q/(1-q)).
  const double q = std::exp(target_old);
  REQUIRE(q < 1.0);
  Matrix snap(2, 6);
  snap.at(0, a0) = std::log(5.0 * q / (1.0 - q));
  // Lane 1 keeps its true snapshot: ratio stays 1.
  for (int j = 0; j < 6; ++j) snap.at(1, j) = buf.logits[0].at(1, j);
  buf.logits[0] = snap;

  TrainConfig cfg;
  cfg.value_coef = 0.0;
  cfg.entropy_coef = 0.0;
  const std::vector<double> adv = {3.0, -1.0};
  const std::vector<double> ret = {0.0, 0.0};
  const double loss = ppo_loss(net, p, buf, adv, ret, cfg);

  // Normalized advantages: mean 1, sample std 2*sqrt(2)/... = sqrt(8).
  const double sd = std::sqrt(((3.0 - 1.0) * (3.0 - 1.0) + (-1.0 - 1.0) * (-1.0 - 1.0)) / 1.0);
  const double a_pos = (3.0 - 1.0) / (sd + 1e-8);
  const double a_neg = (-1.0 - 1.0) / (sd + 1e-8);
  // Lane 0: ratio 1.5, positive advantage, clip 0.2 -> clipped branch 1.2 * a.
  // Lane 1: ratio 1, min(a, a) = a.
  const double expected = -0.5 * (1.2 * a_pos + 1.0 * a_neg);
  CHECK(loss == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("ppo_loss: value and entropy terms match independent computation") {
  const NetConfig net = tiny_flat_net();
  Rng rng(110);
  const Params p = init_policy_params(net, rng);
  const RolloutBuffer buf = collect_flat(net, p, 2, 3, true, 1, 0.0, rng);
  TrainConfig cfg;  // value_coef 0.5, entropy_coef 0.01
  const GaeResult gae = gae_advantages(buf, cfg.gamma, cfg.gae_lambda);
  const double full = ppo_loss(net, p, buf, gae.advantages, gae.returns, cfg);

  TrainConfig bare = cfg;
  bare.value_coef = 0.0;
  bare.entropy_coef = 0.0;
  const double policy_term = ppo_loss(net, p, buf, gae.advantages, gae.returns, bare);

  // Recompute value and entropy terms directly from the forward pass.
  double value_sum = 0.0, plogp_sum = 0.0;
  int n = 0;
  Matrix hidden(2, net.rnn_hidden);
  for (int s = 0; s < buf.steps; ++s) {
    const ForwardOut out = forward_flat(net, p, buf.features[static_cast<std::size_t>(s)], hidden);
    hidden = out.hidden;
    for (int b = 0; b < buf.batch; ++b) {
      const std::size_t i = static_cast<std::size_t>(s) * buf.batch + b;
      if (buf.mask[i] == 0.0) continue;
      ++n;
      const double d = out.value.at(b, 0) - gae.returns[i];
      value_sum += d * d;
      for (int j = 0; j < net.actions; ++j) {
        const double lp = action_log_prob(out.logits, b, j);
        plogp_sum += std::exp(lp) * lp;
      }
    }
  }
  const double expected = policy_term + 0.5 * value_sum / n + 0.01 * plogp_sum / n;
  CHECK(full == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("ppo_loss: non-finite ratio is rejected") {
  const NetConfig net = tiny_flat_net();
  Rng rng(111);
  const Params p = init_policy_params(net, rng);
  RolloutBuffer buf = collect_flat(net, p, 1, 1, true, 0, 0.0, rng);
  buf.logits[0].at(0, buf.actions[0]) = -1e9;  // old log-prob -> -inf, ratio -> inf
  TrainConfig cfg;
  const std::vector<double> adv = {1.0};
  const std::vector<double> ret = {0.0};
  CHECK_THROWS(ppo_loss(net, p, buf, adv, ret, cfg));
}

TEST_CASE("ppo_loss: gradient matches finite differences with active ratios") {
  const NetConfig net = tiny_flat_net();
  Rng rng(112);
  Params p = init_policy_params(net, rng);
  RolloutBuffer buf = collect_flat(net, p, 2, 3, true, 1, 0.3, rng);
  // Doctor the snapshots so ratios leave 1: in-band on most entries, far
  // outside the clip band on one, all away from the kinks.
  for (int s = 0; s < buf.steps; ++s)
    for (int b = 0; b < buf.batch; ++b)
      buf.logits[static_cast<std::size_t>(s)].at(b, buf.actions[static_cast<std::size_t>(s) * 2 + b]) -=
          0.08;
  buf.logits[2].at(0, buf.actions[4]) -= 0.5;

  TrainConfig cfg;
  std::vector<double> adv, ret;
  Rng arng(113);
  for (std::size_t i = 0; i < buf.flat_size(); ++i) {
    adv.push_back(arng.uniform(0.5, 1.5) * (i % 2 == 0 ? 1.0 : -1.0));
    ret.push_back(arng.uniform(-0.5, 0.5));
  }

  Tape t;
  const TapedPolicy policy(t, net, p);
  t.backward(ppo_loss_graph(t, policy, net, buf, adv, ret, cfg));
  const std::vector<double> analytic = policy.grad_flat(t);

  std::vector<double> flat = p.flatten();
  Params scratch = p;
  const double h = 1e-5;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double orig = flat[i];
    flat[i] = orig + h;
    scratch.unflatten(flat);
    const double fp = ppo_loss(net, scratch, buf, adv, ret, cfg);
    flat[i] = orig - h;
    scratch.unflatten(flat);
    const double fm = ppo_loss(net, scratch, buf, adv, ret, cfg);
    flat[i] = orig;
    const double numeric = (fp - fm) / (2.0 * h);
    const double rel =
        std::abs(analytic[i] - numeric) / std::max({std::abs(analytic[i]), std::abs(numeric), 1e-4});
    INFO("param " << i << ": analytic " << analytic[i] << " numeric " << numeric);
    CHECK(rel <= 1e-4);
  }
}

TEST_CASE("combined_update: loss is the weighted sum of its terms") {
  const NetConfig net = tiny_flat_net();
  Rng rng(114);
  Params p = init_policy_params(net, rng);
  const RolloutBuffer logged = collect_flat(net, p, 2, 4, false, 1, 0.2, rng);
  const RolloutBuffer sim = collect_flat(net, p, 2, 4, true, 1, 0.2, rng);
  TrainConfig cfg;
  cfg.w_bc = 1.0;
  cfg.w_rl = 0.05;
  AdamConfig acfg;
  acfg.total_steps = 10;
  Adam opt(acfg, p.total_size());
  const UpdateDiagnostics d = combined_update(net, p, opt, &logged, &sim, cfg);
  CHECK(std::abs(d.combined_loss - (cfg.w_bc * d.bc_loss + cfg.w_rl * d.rl_loss)) <= 1e-12);
  CHECK(d.bc_loss > 0.0);
}

TEST_CASE("combined_update: zero RL weight reproduces the BC-only update bitwise") {
  const NetConfig net = tiny_flat_net();
  Rng rng(115);
  const Params p0 = init_policy_params(net, rng);
  const RolloutBuffer logged = collect_flat(net, p0, 2, 5, false, 1, 0.2, rng);
  const RolloutBuffer sim = collect_flat(net, p0, 2, 5, true, 1, 0.2, rng);

  TrainConfig cfg;
  cfg.w_bc = 1.0;
  cfg.w_rl = 0.0;
  AdamConfig acfg;
  acfg.total_steps = 10;

  Params via_combined = p0;
  Adam opt_a(acfg, p0.total_size());
  // The simulated buffer is present but must not participate at all.
  combined_update(net, via_combined, opt_a, &logged, &sim, cfg);

  Params via_bc = p0;
  Adam opt_b(acfg, p0.total_size());
  bc_update(net, via_bc, opt_b, logged, cfg);

  CHECK(via_combined.flatten() == via_bc.flatten());

  // A second step keeps agreeing (optimizer moments also line up).
  combined_update(net, via_combined, opt_a, &logged, nullptr, cfg);
  bc_update(net, via_bc, opt_b, logged, cfg);
  CHECK(via_combined.flatten() == via_bc.flatten());
}

TEST_CASE("combined_update: zero BC weight reproduces the PPO-only update bitwise") {
  const NetConfig net = tiny_flat_net();
  Rng rng(116);
  const Params p0 = init_policy_params(net, rng);
  const RolloutBuffer sim = collect_flat(net, p0, 3, 6, true, 1, 0.25, rng);

  TrainConfig cfg;
  cfg.w_bc = 0.0;
  cfg.w_rl = 0.05;
  AdamConfig acfg;
  acfg.total_steps = 10;

  Params via_combined = p0;
  Adam opt_a(acfg, p0.total_size());
  combined_update(net, via_combined, opt_a, nullptr, &sim, cfg);

  Params via_ppo = p0;
  Adam opt_b(acfg, p0.total_size());
  ppo_update(net, via_ppo, opt_b, sim, cfg);

  CHECK(via_combined.flatten() == via_ppo.flatten());
}

TEST_CASE("combined_update: BC diagnostics ignore simulated-buffer contents") {
  const NetConfig net = tiny_flat_net();
  Rng rng(117);
  const Params p0 = init_policy_params(net, rng);
  const RolloutBuffer logged = collect_flat(net, p0, 2, 4, false, 0, 0.2, rng);
  RolloutBuffer sim_a = collect_flat(net, p0, 2, 4, true, 0, 0.2, rng);
  RolloutBuffer sim_b = sim_a;
  for (double& r : sim_b.rewards) r -= 1.0;
  for (Matrix& f : sim_b.features) f.at(0, 0) += 0.3;
  for (int& a : sim_b.actions) a = (a + 1) % net.actions;
  for (Matrix& l : sim_b.logits)
    for (double& v : l.data) v += 0.1;

  TrainConfig cfg;
  AdamConfig acfg;
  acfg.total_steps = 10;
  Params pa = p0, pb = p0;
  Adam oa(acfg, p0.total_size()), ob(acfg, p0.total_size());
  const UpdateDiagnostics da = combined_update(net, pa, oa, &logged, &sim_a, cfg);
  const UpdateDiagnostics db = combined_update(net, pb, ob, &logged, &sim_b, cfg);
  CHECK(da.bc_loss == db.bc_loss);
  CHECK(da.rl_loss != db.rl_loss);
}

TEST_CASE("combined_update: configuration errors") {
  const NetConfig net = tiny_flat_net();
  Rng rng(118);
  Params p = init_policy_params(net, rng);
  const RolloutBuffer logged = collect_flat(net, p, 1, 2, false, 0, 0.0, rng);
  AdamConfig acfg;
  Adam opt(acfg, p.total_size());
  TrainConfig cfg;
  CHECK_THROWS(combined_update(net, p, opt, &logged, nullptr, cfg));  // RL weight needs sim
  cfg.w_rl = 0.0;
  CHECK_THROWS(combined_update(net, p, opt, nullptr, nullptr, cfg));  // BC weight needs logged
  cfg.w_bc = 0.0;
  CHECK_THROWS(cfg.validate());  // both weights zero
  cfg = TrainConfig{};
  cfg.gamma = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = TrainConfig{};
  cfg.ppo_clip = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = TrainConfig{};
  cfg.w_bc = -0.1;
  CHECK_THROWS(cfg.validate());
}
