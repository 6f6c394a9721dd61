#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "gaplab/common/error.hpp"
#include "gaplab/common/rng.hpp"
#include "gaplab/nn/adam.hpp"
#include "gaplab/nn/checkpoint.hpp"
#include "gaplab/nn/kernels.hpp"
#include "gaplab/nn/params.hpp"
#include "gaplab/nn/policy.hpp"
#include "gaplab/nn/tape.hpp"

using namespace gaplab;

namespace {

Matrix rand_mat(int rows, int cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data) v = rng.uniform(lo, hi);
  return m;
}

// Scalarizes a matrix node with fixed pseudo-random positive weights so every
// output element contributes a distinct gradient.
Var wsum(Tape& t, Var v, std::uint64_t seed = 1) {
  const Matrix& val = t.value(v);
  Matrix w(val.rows, val.cols);
  Rng rng(seed);
  for (double& x : w.data) x = rng.uniform(0.5, 1.5);
  return vsum(t, mul(t, v, t.constant(std::move(w))));
}

using BuildFn = std::function<Var(Tape&, const std::vector<Var>&)>;

double eval_loss(const std::vector<Matrix>& leaves, const BuildFn& build) {
  Tape t;
  std::vector<Var> vars;
  vars.reserve(leaves.size());
  for (const Matrix& m : leaves) vars.push_back(t.leaf(m));
  return t.value(build(t, vars)).at(0, 0);
}

// Central-difference check of every gradient element against the tape.
void check_gradients(std::vector<Matrix> leaves, const BuildFn& build, double tol = 1e-4) {
  Tape t;
  std::vector<Var> vars;
  for (const Matrix& m : leaves) vars.push_back(t.leaf(m));
  t.backward(build(t, vars));
  std::vector<Matrix> analytic;
  for (Var v : vars) analytic.push_back(t.grad(v));

  const double h = 1e-5;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    REQUIRE(analytic[li].rows == leaves[li].rows);
    REQUIRE(analytic[li].cols == leaves[li].cols);
    for (std::size_t i = 0; i < leaves[li].data.size(); ++i) {
      const double orig = leaves[li].data[i];
      leaves[li].data[i] = orig + h;
      const double fp = eval_loss(leaves, build);
      leaves[li].data[i] = orig - h;
      const double fm = eval_loss(leaves, build);
      leaves[li].data[i] = orig;
      const double numeric = (fp - fm) / (2.0 * h);
      const double ana = analytic[li].data[i];
      const double rel =
          std::abs(ana - numeric) / std::max({std::abs(ana), std::abs(numeric), 1e-4});
      INFO("leaf " << li << " element " << i << ": analytic " << ana << " numeric " << numeric);
      CHECK(rel <= tol);
    }
  }
}

Matrix naive_gemm(const Matrix& a, const Matrix& b, bool bt, bool at) {
  const int rows = at ? a.cols : a.rows;
  const int cols = bt ? b.rows : b.cols;
  const int inner = at ? a.rows : a.cols;
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int k = 0; k < inner; ++k)
        acc += (at ? a.at(k, i) : a.at(i, k)) * (bt ? b.at(j, k) : b.at(k, j));
      out.at(i, j) = acc;
    }
  return out;
}

}  // namespace

TEST_CASE("gemm: all three variants match a naive triple loop") {
  Rng rng(1);
  const Matrix a = rand_mat(5, 7, rng);
  const Matrix b = rand_mat(7, 4, rng);
  Matrix out(5, 4);
  gemm_nn_serial(a, b, out);
  const Matrix ref = naive_gemm(a, b, false, false);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    CHECK(out.data[i] == doctest::Approx(ref.data[i]).epsilon(1e-12));

  const Matrix bt = rand_mat(4, 7, rng);
  Matrix out_nt(5, 4);
  gemm_nt_serial(a, bt, out_nt);
  const Matrix ref_nt = naive_gemm(a, bt, true, false);
  for (std::size_t i = 0; i < out_nt.data.size(); ++i)
    CHECK(out_nt.data[i] == doctest::Approx(ref_nt.data[i]).epsilon(1e-12));

  const Matrix at = rand_mat(7, 5, rng);
  Matrix out_tn(5, 4);
  gemm_tn_serial(at, b, out_tn);
  const Matrix ref_tn = naive_gemm(at, b, false, true);
  for (std::size_t i = 0; i < out_tn.data.size(); ++i)
    CHECK(out_tn.data[i] == doctest::Approx(ref_tn.data[i]).epsilon(1e-12));

  // Accumulation adds on top of the existing contents.
  Matrix acc = ref;
  gemm_nn_serial(a, b, acc, true);
  for (std::size_t i = 0; i < acc.data.size(); ++i)
    CHECK(acc.data[i] == doctest::Approx(2.0 * ref.data[i]).epsilon(1e-12));

  Matrix bad(3, 3);
  CHECK_THROWS(gemm_nn_serial(a, a, bad));
}

TEST_CASE("gemm: parallel entry points are bit-identical to the serial reference") {
  Rng rng(2);
  // Sizes above the dispatch threshold so the OpenMP path actually runs.
  const Matrix a = rand_mat(70, 90, rng);
  const Matrix b = rand_mat(90, 80, rng);
  Matrix par(70, 80), ser(70, 80);
  gemm_nn(a, b, par);
  gemm_nn_serial(a, b, ser);
  CHECK(par == ser);

  const Matrix c = rand_mat(64, 257, rng);
  const Matrix d = rand_mat(96, 257, rng);
  Matrix par_nt(64, 96), ser_nt(64, 96);
  gemm_nt(c, d, par_nt);
  gemm_nt_serial(c, d, ser_nt);
  CHECK(par_nt == ser_nt);

  const Matrix e = rand_mat(257, 64, rng);
  const Matrix f = rand_mat(257, 96, rng);
  Matrix par_tn(64, 96), ser_tn(64, 96);
  gemm_tn(e, f, par_tn);
  gemm_tn_serial(e, f, ser_tn);
  CHECK(par_tn == ser_tn);

  gemm_nn(a, b, par, true);
  gemm_nn_serial(a, b, ser, true);
  CHECK(par == ser);
}

TEST_CASE("tape: elementwise and broadcast op gradients match finite differences") {
  Rng rng(3);
  check_gradients({rand_mat(2, 3, rng), rand_mat(3, 4, rng)},
                  [](Tape& t, const std::vector<Var>& v) {
                    return wsum(t, matmul(t, v[0], v[1]));
                  });
  check_gradients({rand_mat(3, 2, rng), rand_mat(3, 2, rng)},
                  [](Tape& t, const std::vector<Var>& v) { return wsum(t, add(t, v[0], v[1])); });
  check_gradients({rand_mat(3, 2, rng), rand_mat(3, 2, rng)},
                  [](Tape& t, const std::vector<Var>& v) { return wsum(t, sub(t, v[0], v[1])); });
  check_gradients({rand_mat(3, 2, rng), rand_mat(3, 2, rng)},
                  [](Tape& t, const std::vector<Var>& v) { return wsum(t, mul(t, v[0], v[1])); });
  check_gradients({rand_mat(3, 4, rng), rand_mat(1, 4, rng)},
                  [](Tape& t, const std::vector<Var>& v) {
                    return wsum(t, add_row(t, v[0], v[1]));
                  });
  check_gradients({rand_mat(3, 4, rng), rand_mat(3, 1, rng)},
                  [](Tape& t, const std::vector<Var>& v) {
                    return wsum(t, mul_rows(t, v[0], v[1]));
                  });
  check_gradients({rand_mat(3, 3, rng)}, [](Tape& t, const std::vector<Var>& v) {
    return wsum(t, affine(t, v[0], 1.7, -0.3));
  });
}

TEST_CASE("tape: nonlinearity gradients match finite differences") {
  Rng rng(4);
  check_gradients({rand_mat(3, 4, rng, -2, 2)},
                  [](Tape& t, const std::vector<Var>& v) { return wsum(t, vtanh(t, v[0])); });
  check_gradients({rand_mat(3, 4, rng, -3, 3)},
                  [](Tape& t, const std::vector<Var>& v) { return wsum(t, vsigmoid(t, v[0])); });
  check_gradients({rand_mat(3, 4, rng, -2, 1)},
                  [](Tape& t, const std::vector<Var>& v) { return wsum(t, vexp(t, v[0])); });
  check_gradients({rand_mat(3, 5, rng, -2, 2)}, [](Tape& t, const std::vector<Var>& v) {
    return wsum(t, log_softmax_rows(t, v[0]));
  });
}

TEST_CASE("tape: reduction, selection and concatenation gradients") {
  Rng rng(5);
  check_gradients({rand_mat(3, 4, rng)},
                  [](Tape& t, const std::vector<Var>& v) { return vsum(t, v[0]); });
  check_gradients({rand_mat(3, 4, rng)}, [](Tape& t, const std::vector<Var>& v) {
    return affine(t, vmean(t, v[0]), 2.5, 0.0);
  });
  check_gradients({rand_mat(4, 5, rng)}, [](Tape& t, const std::vector<Var>& v) {
    return wsum(t, pick_cols(t, v[0], {1, 0, 3, 2}));
  });
  check_gradients({rand_mat(2, 2, rng), rand_mat(2, 3, rng), rand_mat(2, 1, rng)},
                  [](Tape& t, const std::vector<Var>& v) {
                    return wsum(t, concat_cols(t, {v[0], v[1], v[2]}));
                  });
}

TEST_CASE("tape: masked pooling gradients, including an empty group") {
  Rng rng(6);
  Matrix mask(6, 1);
  mask.data = {1, 0, 1, 1, 0, 0};  // group 0 partial, group 1 partial, group 2 empty
  const Matrix a = rand_mat(6, 3, rng);
  check_gradients({a}, [mask](Tape& t, const std::vector<Var>& v) {
    return wsum(t, segment_mean(t, v[0], t.constant(mask), 3, 2));
  });
  check_gradients({a}, [mask](Tape& t, const std::vector<Var>& v) {
    return wsum(t, segment_max(t, v[0], t.constant(mask), 3, 2));
  });
}

TEST_CASE("tape: layer norm gradients for inputs, gain and bias") {
  Rng rng(7);
  check_gradients({rand_mat(4, 6, rng), rand_mat(1, 6, rng, 0.5, 1.5), rand_mat(1, 6, rng)},
                  [](Tape& t, const std::vector<Var>& v) {
                    return wsum(t, layernorm_rows(t, v[0], v[1], v[2]));
                  });
}

TEST_CASE("tape: min and clamp gradients away from their kinks") {
  Rng rng(8);
  Matrix a = rand_mat(3, 3, rng);
  Matrix b = a;
  for (std::size_t i = 0; i < b.data.size(); ++i)
    b.data[i] += (i % 2 == 0 ? 0.3 : -0.3) * (1.0 + 0.1 * static_cast<double>(i));
  check_gradients({a, b}, [](Tape& t, const std::vector<Var>& v) {
    return wsum(t, min_elem(t, v[0], v[1]));
  });
  Matrix x(2, 3);
  x.data = {-1.7, -0.4, 0.1, 0.6, 1.4, 2.3};  // clamp to [-1, 1], margins >= 0.1
  check_gradients({x}, [](Tape& t, const std::vector<Var>& v) {
    return wsum(t, clamp(t, v[0], -1.0, 1.0));
  });
}

TEST_CASE("tape: tie and boundary conventions for min and clamp") {
  Matrix m(1, 1);
  m.data = {0.5};
  Tape t;
  const Var a = t.leaf(m);
  const Var b = t.leaf(m);
  t.backward(vsum(t, min_elem(t, a, b)));
  CHECK(t.grad(a).at(0, 0) == 1.0);  // ties route to the first argument
  CHECK(t.grad(b).at(0, 0) == 0.0);

  Matrix edge(1, 3);
  edge.data = {-1.0, 1.0, 1.0 + 1e-9};  // exact boundaries pass gradient, outside does not
  Tape t2;
  const Var x = t2.leaf(edge);
  t2.backward(vsum(t2, clamp(t2, x, -1.0, 1.0)));
  CHECK(t2.grad(x).at(0, 0) == 1.0);
  CHECK(t2.grad(x).at(0, 1) == 1.0);
  CHECK(t2.grad(x).at(0, 2) == 0.0);
}

TEST_CASE("tape: lifecycle guards") {
  Rng rng(9);
  Tape t;
  const Var a = t.leaf(rand_mat(2, 2, rng));
  const Var unused = t.leaf(rand_mat(3, 1, rng));
  const Var loss = vsum(t, mul(t, a, a));
  CHECK_THROWS(t.grad(a));  // no gradients before backward
  t.backward(loss);
  CHECK_THROWS(t.backward(loss));  // accumulation across backwards is disabled
  const Matrix& gu = t.grad(unused);
  CHECK(gu.rows == 3);
  CHECK(gu.cols == 1);
  for (double v : gu.data) CHECK(v == 0.0);

  Tape t2;
  const Var big = t2.leaf(rand_mat(2, 2, rng));
  CHECK_THROWS(t2.backward(big));  // loss must be scalar

  Tape t3;
  const Var c = t3.constant(rand_mat(1, 1, rng));
  CHECK_THROWS(t3.backward(c));  // loss must depend on a leaf
}

TEST_CASE("policy: flat forward agrees bitwise with the taped graph over chained steps") {
  NetConfig cfg;
  cfg.encoder = EncoderKind::kFlat;
  cfg.flat_dim = 6;
  cfg.enc_hidden = 8;
  cfg.embed_dim = 8;
  cfg.rnn_hidden = 8;
  cfg.value_hidden = 8;
  cfg.actions = 5;
  Rng rng(10);
  const Params p = init_policy_params(cfg, rng);

  const int batch = 3;
  Matrix hidden_infer(batch, cfg.rnn_hidden);
  Tape t;
  TapedPolicy taped(t, cfg, p);
  Var hidden_taped = t.constant(Matrix(batch, cfg.rnn_hidden));
  for (int step = 0; step < 3; ++step) {
    const Matrix feats = rand_mat(batch, cfg.flat_dim, rng);
    const ForwardOut out = forward_flat(cfg, p, feats, hidden_infer);
    const auto taped_out = taped.step_flat(t, t.constant(feats), hidden_taped);
    CHECK(out.logits == t.value(taped_out.logits));
    CHECK(out.value == t.value(taped_out.value));
    CHECK(out.hidden == t.value(taped_out.hidden));
    hidden_infer = out.hidden;
    hidden_taped = taped_out.hidden;
  }
}

TEST_CASE("policy: scene forward agrees bitwise with the taped graph") {
  NetConfig cfg;
  cfg.encoder = EncoderKind::kScene;
  cfg.object_dim = 4;
  cfg.road_dim = 3;
  cfg.max_objects = 3;
  cfg.max_road_points = 4;
  cfg.enc_hidden = 6;
  cfg.embed_dim = 5;
  cfg.rnn_hidden = 6;
  cfg.value_hidden = 6;
  cfg.actions = 4;
  Rng rng(11);
  const Params p = init_policy_params(cfg, rng);

  SceneBatch in;
  in.batch = 2;
  in.obj = rand_mat(6, 4, rng);
  in.obj_mask = Matrix(6, 1);
  in.obj_mask.data = {1, 1, 0, 1, 0, 0};
  in.road = rand_mat(8, 3, rng);
  in.road_mask = Matrix(8, 1);
  in.road_mask.data = {1, 0, 1, 1, 0, 0, 0, 0};  // element 1 has no road at all
  in.ego_speed = rand_mat(2, 1, rng, 0, 10);
  const Matrix hidden(2, cfg.rnn_hidden);

  const ForwardOut out = forward_scene(cfg, p, in, hidden);
  Tape t;
  TapedPolicy taped(t, cfg, p);
  const auto taped_out = taped.step_scene(t, in, t.constant(hidden));
  CHECK(out.logits == t.value(taped_out.logits));
  CHECK(out.value == t.value(taped_out.value));
  CHECK(out.hidden == t.value(taped_out.hidden));
}

TEST_CASE("policy: masked rows cannot influence the forward pass") {
  NetConfig cfg;
  cfg.encoder = EncoderKind::kScene;
  cfg.object_dim = 4;
  cfg.road_dim = 3;
  cfg.max_objects = 3;
  cfg.max_road_points = 4;
  cfg.enc_hidden = 6;
  cfg.embed_dim = 5;
  cfg.rnn_hidden = 6;
  cfg.value_hidden = 6;
  cfg.actions = 4;
  Rng rng(12);
  const Params p = init_policy_params(cfg, rng);

  SceneBatch in;
  in.batch = 2;
  in.obj = rand_mat(6, 4, rng);
  in.obj_mask = Matrix(6, 1);
  in.obj_mask.data = {1, 0, 1, 1, 1, 0};
  in.road = rand_mat(8, 3, rng);
  in.road_mask = Matrix(8, 1);
  in.road_mask.data = {1, 1, 0, 0, 1, 1, 1, 0};
  in.ego_speed = rand_mat(2, 1, rng, 0, 10);
  const Matrix hidden = rand_mat(2, cfg.rnn_hidden, rng, -0.5, 0.5);
  const ForwardOut base = forward_scene(cfg, p, in, hidden);

  SceneBatch garbled = in;
  for (int r : {1, 5}) // masked object rows
    for (int c = 0; c < 4; ++c) garbled.obj.at(r, c) = 1e6;
  for (int r : {2, 3, 7}) // masked road rows
    for (int c = 0; c < 3; ++c) garbled.road.at(r, c) = -1e6;
  const ForwardOut poked = forward_scene(cfg, p, garbled, hidden);
  CHECK(base.logits == poked.logits);
  CHECK(base.value == poked.value);
  CHECK(base.hidden == poked.hidden);
}

TEST_CASE("policy: object pooling is permutation invariant") {
  NetConfig cfg;
  cfg.encoder = EncoderKind::kScene;
  cfg.object_dim = 4;
  cfg.road_dim = 3;
  cfg.max_objects = 4;
  cfg.max_road_points = 4;
  cfg.enc_hidden = 6;
  cfg.embed_dim = 5;
  cfg.rnn_hidden = 6;
  cfg.value_hidden = 6;
  cfg.actions = 4;
  Rng rng(13);
  const Params p = init_policy_params(cfg, rng);

  SceneBatch in;
  in.batch = 1;
  in.obj = rand_mat(4, 4, rng);
  in.obj_mask = Matrix(4, 1);
  in.obj_mask.data = {1, 1, 1, 1};
  in.road = rand_mat(4, 3, rng);
  in.road_mask = Matrix(4, 1);
  in.road_mask.data = {1, 1, 1, 0};
  in.ego_speed = rand_mat(1, 1, rng, 0, 10);
  const Matrix hidden(1, cfg.rnn_hidden);
  const ForwardOut base = forward_scene(cfg, p, in, hidden);

  SceneBatch permuted = in;
  const int perm[4] = {2, 0, 3, 1};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) permuted.obj.at(r, c) = in.obj.at(perm[r], c);
  const int road_perm[4] = {1, 2, 0, 3};  // keeps the masked row in place
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) permuted.road.at(r, c) = in.road.at(road_perm[r], c);
  const ForwardOut shuffled = forward_scene(cfg, p, permuted, hidden);
  for (std::size_t i = 0; i < base.logits.data.size(); ++i)
    CHECK(shuffled.logits.data[i] == doctest::Approx(base.logits.data[i]).epsilon(1e-9));
  for (std::size_t i = 0; i < base.hidden.data.size(); ++i)
    CHECK(shuffled.hidden.data[i] == doctest::Approx(base.hidden.data[i]).epsilon(1e-9));
}

TEST_CASE("policy: full network gradients match finite differences (flat, two steps)") {
  NetConfig cfg;
  cfg.encoder = EncoderKind::kFlat;
  cfg.flat_dim = 5;
  cfg.enc_hidden = 6;
  cfg.embed_dim = 6;
  cfg.rnn_hidden = 6;
  cfg.value_hidden = 5;
  cfg.actions = 4;
  Rng rng(14);
  Params p = init_policy_params(cfg, rng);

  const int batch = 3;
  const Matrix f1 = rand_mat(batch, cfg.flat_dim, rng);
  const Matrix f2 = rand_mat(batch, cfg.flat_dim, rng);
  const std::vector<int> actions = {0, 2, 1};

  auto build = [&](Tape& t, const Params& params) {
    TapedPolicy taped(t, cfg, params);
    Var hidden = t.constant(Matrix(batch, cfg.rnn_hidden));
    const auto s1 = taped.step_flat(t, t.constant(f1), hidden);
    const auto s2 = taped.step_flat(t, t.constant(f2), s1.hidden);
    const Var lp = log_softmax_rows(t, s2.logits);
    const Var nll = affine(t, vmean(t, pick_cols(t, lp, actions)), -1.0, 0.0);
    const Var verr = vmean(t, mul(t, s2.value, s2.value));
    const Var probs = vexp(t, lp);
    const Var ent = affine(t, vmean(t, mul(t, probs, lp)), -1.0, 0.0);
    return add(t, add(t, nll, verr), affine(t, ent, 0.01, 0.0));
  };

  Tape t;
  TapedPolicy taped(t, cfg, p);
  {
    Var hidden = t.constant(Matrix(batch, cfg.rnn_hidden));
    const auto s1 = taped.step_flat(t, t.constant(f1), hidden);
    const auto s2 = taped.step_flat(t, t.constant(f2), s1.hidden);
    const Var lp = log_softmax_rows(t, s2.logits);
    const Var nll = affine(t, vmean(t, pick_cols(t, lp, actions)), -1.0, 0.0);
    const Var verr = vmean(t, mul(t, s2.value, s2.value));
    const Var probs = vexp(t, lp);
    const Var ent = affine(t, vmean(t, mul(t, probs, lp)), -1.0, 0.0);
    t.backward(add(t, add(t, nll, verr), affine(t, ent, 0.01, 0.0)));
  }
  const std::vector<double> analytic = taped.grad_flat(t);

  std::vector<double> flat = p.flatten();
  REQUIRE(analytic.size() == flat.size());
  const double h = 1e-5;
  Params scratch = p;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double orig = flat[i];
    flat[i] = orig + h;
    scratch.unflatten(flat);
    Tape tp;
    const double fp = tp.value(build(tp, scratch)).at(0, 0);
    flat[i] = orig - h;
    scratch.unflatten(flat);
    Tape tm;
    const double fm = tm.value(build(tm, scratch)).at(0, 0);
    flat[i] = orig;
    const double numeric = (fp - fm) / (2.0 * h);
    const double rel =
        std::abs(analytic[i] - numeric) / std::max({std::abs(analytic[i]), std::abs(numeric), 1e-4});
    INFO("param " << i << ": analytic " << analytic[i] << " numeric " << numeric);
    CHECK(rel <= 1e-4);
  }
}

TEST_CASE("policy: full network gradients match finite differences (scene)") {
  NetConfig cfg;
  cfg.encoder = EncoderKind::kScene;
  cfg.object_dim = 3;
  cfg.road_dim = 3;
  cfg.max_objects = 3;
  cfg.max_road_points = 3;
  cfg.enc_hidden = 4;
  cfg.embed_dim = 4;
  cfg.rnn_hidden = 4;
  cfg.value_hidden = 4;
  cfg.actions = 3;
  Rng rng(15);
  Params p = init_policy_params(cfg, rng);

  SceneBatch in;
  in.batch = 2;
  in.obj = rand_mat(6, 3, rng);
  in.obj_mask = Matrix(6, 1);
  in.obj_mask.data = {1, 1, 0, 1, 1, 1};
  in.road = rand_mat(6, 3, rng);
  in.road_mask = Matrix(6, 1);
  in.road_mask.data = {1, 1, 1, 1, 0, 0};
  in.ego_speed = rand_mat(2, 1, rng, 0, 5);
  const std::vector<int> actions = {2, 0};

  auto build = [&](Tape& t, const Params& params) {
    TapedPolicy taped(t, cfg, params);
    const auto s = taped.step_scene(t, in, t.constant(Matrix(2, cfg.rnn_hidden)));
    const Var lp = log_softmax_rows(t, s.logits);
    const Var nll = affine(t, vmean(t, pick_cols(t, lp, actions)), -1.0, 0.0);
    const Var verr = vmean(t, mul(t, s.value, s.value));
    return add(t, add(t, nll, verr), affine(t, wsum(t, s.hidden), 0.01, 0.0));
  };

  Tape t;
  std::vector<double> analytic;
  {
    TapedPolicy taped(t, cfg, p);
    const auto s = taped.step_scene(t, in, t.constant(Matrix(2, cfg.rnn_hidden)));
    const Var lp = log_softmax_rows(t, s.logits);
    const Var nll = affine(t, vmean(t, pick_cols(t, lp, actions)), -1.0, 0.0);
    const Var verr = vmean(t, mul(t, s.value, s.value));
    t.backward(add(t, add(t, nll, verr), affine(t, wsum(t, s.hidden), 0.01, 0.0)));
    analytic = taped.grad_flat(t);
  }

  std::vector<double> flat = p.flatten();
  REQUIRE(analytic.size() == flat.size());
  const double h = 1e-5;
  Params scratch = p;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double orig = flat[i];
    flat[i] = orig + h;
    scratch.unflatten(flat);
    Tape tp;
    const double fp = tp.value(build(tp, scratch)).at(0, 0);
    flat[i] = orig - h;
    scratch.unflatten(flat);
    Tape tm;
    const double fm = tm.value(build(tm, scratch)).at(0, 0);
    flat[i] = orig;
    const double numeric = (fp - fm) / (2.0 * h);
    const double rel =
        std::abs(analytic[i] - numeric) / std::max({std::abs(analytic[i]), std::abs(numeric), 1e-4});
    INFO("param " << i << ": analytic " << analytic[i] << " numeric " << numeric);
    CHECK(rel <= 1e-4);
  }
}

TEST_CASE("policy: action sampling follows the softmax") {
  Matrix logits(2, 4);
  logits.data = {10, 0, 0, 0, 0, 0, 0, 0};
  Rng rng(16);
  int hits = 0;
  for (int i = 0; i < 10000; ++i) hits += sample_action(logits, 0, rng) == 0 ? 1 : 0;
  CHECK(static_cast<double>(hits) / 10000.0 >= 0.999);

  int counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < 20000; ++i) counts[sample_action(logits, 1, rng)] += 1;
  for (int c : counts) {
    CHECK(c > 4500);
    CHECK(c < 5500);
  }

  Matrix tie(1, 3);
  tie.data = {1.0, 5.0, 5.0};
  CHECK(greedy_action(tie, 0) == 1);

  // Log-probabilities agree bitwise with the log-softmax op and normalize.
  Matrix row = rand_mat(1, 6, rng, -2, 2);
  Matrix ls;
  rawops::log_softmax_rows(row, ls);
  double total = 0.0;
  for (int j = 0; j < 6; ++j) {
    CHECK(action_log_prob(row, 0, j) == ls.at(0, j));
    total += std::exp(ls.at(0, j));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("adam: cosine schedule endpoints and inertness at the horizon") {
  AdamConfig cfg;
  cfg.lr_max = 0.02;
  cfg.total_steps = 5;
  Adam opt(cfg, 3);
  CHECK(opt.lr() == doctest::Approx(0.02).epsilon(1e-15));
  std::vector<double> params = {1.0, -2.0, 0.5};
  const std::vector<double> grads = {0.3, -0.1, 0.7};
  std::vector<double> lrs;
  for (int i = 0; i < 5; ++i) {
    lrs.push_back(opt.lr());
    opt.step(params, grads);
  }
  for (std::size_t i = 1; i < lrs.size(); ++i) CHECK(lrs[i] < lrs[i - 1]);
  CHECK(opt.lr() == doctest::Approx(0.0).epsilon(1e-15));
  const std::vector<double> frozen = params;
  opt.step(params, grads);
  CHECK(params == frozen);  // zero learning rate leaves weights bitwise intact
}

TEST_CASE("adam: drives a quadratic to its minimum") {
  const std::vector<double> target = {3.0, -1.5, 0.25, -4.0};
  std::vector<double> x = {5.0, 2.0, -3.0, 8.0};
  AdamConfig cfg;
  cfg.lr_max = 0.1;
  cfg.total_steps = 1000;
  Adam opt(cfg, x.size());
  std::vector<double> g(x.size());
  for (int i = 0; i < 1000; ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) g[j] = 2.0 * (x[j] - target[j]);
    opt.step(x, g);
  }
  for (std::size_t j = 0; j < x.size(); ++j)
    CHECK(std::abs(x[j] - target[j]) < 1e-3);
}

TEST_CASE("adam: rejects non-finite gradients and size mismatches") {
  AdamConfig cfg;
  Adam opt(cfg, 2);
  std::vector<double> params = {0.0, 0.0};
  CHECK_THROWS(opt.step(params, {1.0, std::nan("")}));
  CHECK_THROWS(opt.step(params, {1.0, std::numeric_limits<double>::infinity()}));
  CHECK_THROWS(opt.step(params, {1.0}));
  cfg.total_steps = 0;
  CHECK_THROWS(Adam(cfg, 2));
}

TEST_CASE("params: flat view round-trips bitwise and guards its invariants") {
  Params p;
  Rng rng(17);
  p.add("a.w", 3, 4).data = rand_mat(3, 4, rng).data;
  p.add("a.b", 1, 4).data = rand_mat(1, 4, rng).data;
  p.add("z", 2, 2).data = rand_mat(2, 2, rng).data;
  CHECK(p.total_size() == 12 + 4 + 4);
  const std::vector<double> flat = p.flatten();
  Params q = p;
  for (auto& item : q.items)
    for (double& v : item.second.data) v = 0.0;
  q.unflatten(flat);
  for (std::size_t i = 0; i < p.items.size(); ++i) CHECK(q.items[i].second == p.items[i].second);
  CHECK_THROWS(p.add("a.w", 1, 1));
  CHECK_THROWS(p.get("missing"));
  try {
    p.get("missing");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
  }
  std::vector<double> short_flat(3, 0.0);
  CHECK_THROWS(p.unflatten(short_flat));
}

TEST_CASE("init: orthogonal draws have orthonormal rows or columns") {
  Rng rng(18);
  for (auto [r, c] : {std::pair{6, 6}, {4, 8}, {8, 4}}) {
    Matrix m(r, c);
    init_orthogonal(m, rng);
    const bool by_rows = r <= c;
    const int n = by_rows ? r : c;
    const int dim = by_rows ? c : r;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        double dot = 0.0;
        for (int k = 0; k < dim; ++k)
          dot += (by_rows ? m.at(i, k) * m.at(j, k) : m.at(k, i) * m.at(k, j));
        CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("init: policy parameters are deterministic and well scaled") {
  NetConfig cfg;
  cfg.encoder = EncoderKind::kFlat;
  cfg.flat_dim = 10;
  Rng a(19), b(19);
  const Params pa = init_policy_params(cfg, a);
  const Params pb = init_policy_params(cfg, b);
  CHECK(pa.flatten() == pb.flatten());
  // Action head scaled down for a near-uniform starting policy.
  const Matrix& act = pa.get("act.w");
  const double limit = 0.01 * std::sqrt(6.0 / (act.rows + act.cols));
  for (double v : act.data) CHECK(std::abs(v) <= limit);
  for (double v : pa.get("act.b").data) CHECK(v == 0.0);
  for (double v : pa.get("enc.ln_g").data) CHECK(v == 1.0);
  for (double v : pa.get("gru.bz").data) CHECK(v == 0.0);
  // Glorot layers stay inside their bound.
  const Matrix& w = pa.get("enc.l1.w");
  const double glim = std::sqrt(6.0 / (w.rows + w.cols));
  for (double v : w.data) CHECK(std::abs(v) <= glim);
}

TEST_CASE("checkpoint: round-trips exactly and rejects corruption") {
  NetConfig cfg;
  cfg.encoder = EncoderKind::kFlat;
  cfg.flat_dim = 7;
  cfg.actions = 9;
  Rng rng(20);
  Checkpoint ck;
  ck.net = cfg;
  ck.params = init_policy_params(cfg, rng);
  ck.run_config = "env = maze\nseed = 3\n";
  ck.update = 42;
  const std::string path = "ckpt_roundtrip_test.bin";
  save_checkpoint(path, ck);

  const Checkpoint back = load_checkpoint(path);
  CHECK(back.update == 42);
  CHECK(back.run_config == ck.run_config);
  CHECK(back.net.encoder == cfg.encoder);
  CHECK(back.net.flat_dim == 7);
  CHECK(back.net.actions == 9);
  CHECK(back.params.flatten() == ck.params.flatten());
  REQUIRE(back.params.items.size() == ck.params.items.size());
  for (std::size_t i = 0; i < back.params.items.size(); ++i)
    CHECK(back.params.items[i].first == ck.params.items[i].first);

  // Corrupt one byte of the stored run configuration: hash check trips.
  {
    std::FILE* f = std::fopen(path.c_str(), "rb+");
    REQUIRE(f != nullptr);
    std::fseek(f, 24, SEEK_SET);
    std::fputc('X', f);
    std::fclose(f);
  }
  CHECK_THROWS(load_checkpoint(path));

  // Corrupt the magic.
  save_checkpoint(path, ck);
  {
    std::FILE* f = std::fopen(path.c_str(), "rb+");
    REQUIRE(f != nullptr);
    std::fputc('Z', f);
    std::fclose(f);
  }
  CHECK_THROWS(load_checkpoint(path));
  std::remove(path.c_str());
  CHECK_THROWS(load_checkpoint("no_such_checkpoint.bin"));
  CHECK(checkpoint_name(12) == "ckpt_12.bin");
}
