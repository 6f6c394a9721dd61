#include "gaplab/nn/policy.hpp"

#include <algorithm>
#include <cmath>

#include "gaplab/common/error.hpp"
#include "gaplab/nn/kernels.hpp"

namespace gaplab {

void NetConfig::validate() const {
  require(enc_hidden > 0 && embed_dim > 0 && rnn_hidden > 0 && value_hidden > 0 && actions > 0,
          "net config: layer sizes must be positive");
  if (encoder == EncoderKind::kFlat) {
    require(flat_dim > 0, "net config: flat encoder needs flat_dim > 0");
  } else {
    require(object_dim > 0 && road_dim > 0 && max_objects > 0 && max_road_points > 0,
            "net config: scene encoder needs positive feature dims");
  }
}

void init_glorot(Matrix& m, Rng& rng) {
  const double limit = std::sqrt(6.0 / (m.rows + m.cols));
  for (double& v : m.data) v = rng.uniform(-limit, limit);
}

void init_orthogonal(Matrix& m, Rng& rng) {
  for (double& v : m.data) v = rng.normal(0.0, 1.0);
  // Modified Gram-Schmidt on the shorter side.
  const bool by_rows = m.rows <= m.cols;
  const int n_vec = by_rows ? m.rows : m.cols;
  const int dim = by_rows ? m.cols : m.rows;
  auto get = [&](int vec, int i) -> double& { return by_rows ? m.at(vec, i) : m.at(i, vec); };
  for (int v = 0; v < n_vec; ++v) {
    for (int u = 0; u < v; ++u) {
      double dot = 0.0;
      for (int i = 0; i < dim; ++i) dot += get(u, i) * get(v, i);
      for (int i = 0; i < dim; ++i) get(v, i) -= dot * get(u, i);
    }
    double norm = 0.0;
    for (int i = 0; i < dim; ++i) norm += get(v, i) * get(v, i);
    norm = std::sqrt(norm);
    require(norm > 1e-12, "init_orthogonal: degenerate draw");
    for (int i = 0; i < dim; ++i) get(v, i) /= norm;
  }
}

Params init_policy_params(const NetConfig& cfg, Rng& rng) {
  cfg.validate();
  Params p;
  auto dense = [&](const std::string& prefix, int in, int out) {
    init_glorot(p.add(prefix + ".w", in, out), rng);
    p.add(prefix + ".b", 1, out);
  };
  if (cfg.encoder == EncoderKind::kScene) {
    dense("obj.l1", cfg.object_dim, cfg.enc_hidden);
    dense("obj.l2", cfg.enc_hidden, cfg.embed_dim);
    p.add("obj.ln_g", 1, cfg.embed_dim).data.assign(static_cast<std::size_t>(cfg.embed_dim), 1.0);
    p.add("obj.ln_b", 1, cfg.embed_dim);
    dense("road.l1", cfg.road_dim, cfg.enc_hidden);
    dense("road.l2", cfg.enc_hidden, cfg.embed_dim);
    p.add("road.ln_g", 1, cfg.embed_dim)
        .data.assign(static_cast<std::size_t>(cfg.embed_dim), 1.0);
    p.add("road.ln_b", 1, cfg.embed_dim);
  } else {
    dense("enc.l1", cfg.flat_dim, cfg.enc_hidden);
    dense("enc.l2", cfg.enc_hidden, cfg.embed_dim);
    p.add("enc.ln_g", 1, cfg.embed_dim).data.assign(static_cast<std::size_t>(cfg.embed_dim), 1.0);
    p.add("enc.ln_b", 1, cfg.embed_dim);
  }
  const int in = cfg.rnn_input_dim();
  const int h = cfg.rnn_hidden;
  for (const char* gate : {"z", "r", "n"}) {
    init_glorot(p.add(std::string("gru.w") + gate, in, h), rng);
    init_orthogonal(p.add(std::string("gru.u") + gate, h, h), rng);
  }
  p.add("gru.bz", 1, h);
  p.add("gru.br", 1, h);
  p.add("gru.bin", 1, h);
  p.add("gru.bhn", 1, h);
  Matrix& act = p.add("act.w", h, cfg.actions);
  init_glorot(act, rng);
  for (double& v : act.data) v *= 0.01;
  p.add("act.b", 1, cfg.actions);
  dense("val.l1", h, cfg.value_hidden);
  dense("val.l2", cfg.value_hidden, 1);
  return p;
}

namespace {

// x * W + b, then tanh when asked. Shared arithmetic with the taped path:
// gemm, then row-broadcast add, then tanh.
Matrix dense_infer(const Matrix& x, const Matrix& w, const Matrix& b, bool apply_tanh) {
  Matrix out(x.rows, w.cols);
  gemm_nn(x, w, out);
  rawops::add_row_inplace(out, b);
  if (apply_tanh) rawops::tanh_inplace(out);
  return out;
}

Matrix gru_infer(const Params& p, const Matrix& x, const Matrix& h) {
  Matrix z(x.rows, h.cols), r(x.rows, h.cols), tmp(x.rows, h.cols);
  gemm_nn(x, p.get("gru.wz"), z);
  gemm_nn(h, p.get("gru.uz"), tmp);
  rawops::add_inplace(z, tmp);
  rawops::add_row_inplace(z, p.get("gru.bz"));
  rawops::sigmoid_inplace(z);
  gemm_nn(x, p.get("gru.wr"), r);
  gemm_nn(h, p.get("gru.ur"), tmp);
  rawops::add_inplace(r, tmp);
  rawops::add_row_inplace(r, p.get("gru.br"));
  rawops::sigmoid_inplace(r);
  Matrix hn(x.rows, h.cols);
  gemm_nn(h, p.get("gru.un"), hn);
  rawops::add_row_inplace(hn, p.get("gru.bhn"));
  Matrix xn(x.rows, h.cols);
  gemm_nn(x, p.get("gru.wn"), xn);
  rawops::add_row_inplace(xn, p.get("gru.bin"));
  Matrix rhn;
  rawops::mul_into(r, hn, rhn);
  Matrix cand = xn;
  rawops::add_inplace(cand, rhn);
  rawops::tanh_inplace(cand);
  Matrix zh;
  rawops::mul_into(z, h, zh);
  Matrix one_minus_z = z;
  rawops::affine_inplace(one_minus_z, -1.0, 1.0);
  Matrix omz_cand;
  rawops::mul_into(one_minus_z, cand, omz_cand);
  rawops::add_inplace(zh, omz_cand);
  return zh;
}

ForwardOut heads_infer(const Params& p, Matrix hidden) {
  ForwardOut out;
  out.logits = dense_infer(hidden, p.get("act.w"), p.get("act.b"), false);
  Matrix vh = dense_infer(hidden, p.get("val.l1.w"), p.get("val.l1.b"), true);
  out.value = dense_infer(vh, p.get("val.l2.w"), p.get("val.l2.b"), false);
  out.hidden = std::move(hidden);
  return out;
}

void check_hidden(const NetConfig& cfg, const Matrix& hidden, int batch) {
  require(hidden.rows == batch && hidden.cols == cfg.rnn_hidden,
          "forward: hidden state shape " + hidden.shape_str() + ", expected [" +
              std::to_string(batch) + "x" + std::to_string(cfg.rnn_hidden) + "]");
}

}  // namespace

ForwardOut forward_scene(const NetConfig& cfg, const Params& p, const SceneBatch& in,
                         const Matrix& hidden) {
  require(cfg.encoder == EncoderKind::kScene, "forward_scene: config is not a scene encoder");
  const int b = in.batch;
  require(in.obj.rows == b * cfg.max_objects && in.obj.cols == cfg.object_dim,
          "forward: object features shape " + in.obj.shape_str());
  require(in.road.rows == b * cfg.max_road_points && in.road.cols == cfg.road_dim,
          "forward: road features shape " + in.road.shape_str());
  require(in.ego_speed.rows == b && in.ego_speed.cols == 1,
          "forward: ego speed shape " + in.ego_speed.shape_str());
  check_hidden(cfg, hidden, b);

  Matrix obj_h = dense_infer(in.obj, p.get("obj.l1.w"), p.get("obj.l1.b"), true);
  Matrix obj_e = dense_infer(obj_h, p.get("obj.l2.w"), p.get("obj.l2.b"), true);
  Matrix obj_pool;
  rawops::segment_mean(obj_e, in.obj_mask, b, cfg.max_objects, obj_pool, nullptr);
  Matrix obj_ln;
  rawops::layernorm_rows(obj_pool, p.get("obj.ln_g"), p.get("obj.ln_b"), obj_ln, nullptr);

  Matrix road_h = dense_infer(in.road, p.get("road.l1.w"), p.get("road.l1.b"), true);
  Matrix road_e = dense_infer(road_h, p.get("road.l2.w"), p.get("road.l2.b"), true);
  Matrix road_pool;
  rawops::segment_max(road_e, in.road_mask, b, cfg.max_road_points, road_pool, nullptr);
  Matrix road_ln;
  rawops::layernorm_rows(road_pool, p.get("road.ln_g"), p.get("road.ln_b"), road_ln, nullptr);

  Matrix trunk(b, cfg.rnn_input_dim());
  for (int i = 0; i < b; ++i) {
    double* t = trunk.row(i);
    std::copy(obj_ln.row(i), obj_ln.row(i) + cfg.embed_dim, t);
    std::copy(road_ln.row(i), road_ln.row(i) + cfg.embed_dim, t + cfg.embed_dim);
    t[2 * cfg.embed_dim] = in.ego_speed.at(i, 0);
  }
  return heads_infer(p, gru_infer(p, trunk, hidden));
}

ForwardOut forward_flat(const NetConfig& cfg, const Params& p, const Matrix& features,
                        const Matrix& hidden) {
  require(cfg.encoder == EncoderKind::kFlat, "forward_flat: config is not a flat encoder");
  require(features.cols == cfg.flat_dim,
          "forward: flat features shape " + features.shape_str() + ", expected cols " +
              std::to_string(cfg.flat_dim));
  check_hidden(cfg, hidden, features.rows);
  Matrix h1 = dense_infer(features, p.get("enc.l1.w"), p.get("enc.l1.b"), true);
  Matrix h2 = dense_infer(h1, p.get("enc.l2.w"), p.get("enc.l2.b"), true);
  Matrix ln;
  rawops::layernorm_rows(h2, p.get("enc.ln_g"), p.get("enc.ln_b"), ln, nullptr);
  return heads_infer(p, gru_infer(p, ln, hidden));
}

TapedPolicy::TapedPolicy(Tape& tape, const NetConfig& cfg, const Params& params) : cfg_(cfg) {
  leaves_.reserve(params.items.size());
  for (const auto& [name, m] : params.items) leaves_.emplace_back(name, tape.leaf(m));
}

Var TapedPolicy::param(const std::string& name) const {
  for (const auto& [n, v] : leaves_)
    if (n == name) return v;
  throw Error("taped policy: no tensor named " + name);
}

std::vector<double> TapedPolicy::grad_flat(const Tape& tape) const {
  std::vector<double> flat;
  for (const auto& [name, v] : leaves_) {
    const Matrix& g = tape.grad(v);
    flat.insert(flat.end(), g.data.begin(), g.data.end());
  }
  return flat;
}

namespace {

Var dense_taped(Tape& t, Var x, Var w, Var b, bool apply_tanh) {
  Var out = add_row(t, matmul(t, x, w), b);
  return apply_tanh ? vtanh(t, out) : out;
}

}  // namespace

TapedPolicy::StepOut TapedPolicy::step_scene(Tape& t, const SceneBatch& in, Var hidden) const {
  require(cfg_.encoder == EncoderKind::kScene, "step_scene: config is not a scene encoder");
  const int b = in.batch;
  Var obj = t.constant(in.obj);
  Var obj_mask = t.constant(in.obj_mask);
  Var road = t.constant(in.road);
  Var road_mask = t.constant(in.road_mask);
  Var speed = t.constant(in.ego_speed);

  Var obj_e = dense_taped(t, dense_taped(t, obj, param("obj.l1.w"), param("obj.l1.b"), true),
                          param("obj.l2.w"), param("obj.l2.b"), true);
  Var obj_ln = layernorm_rows(t, segment_mean(t, obj_e, obj_mask, b, cfg_.max_objects),
                              param("obj.ln_g"), param("obj.ln_b"));
  Var road_e = dense_taped(t, dense_taped(t, road, param("road.l1.w"), param("road.l1.b"), true),
                           param("road.l2.w"), param("road.l2.b"), true);
  Var road_ln = layernorm_rows(t, segment_max(t, road_e, road_mask, b, cfg_.max_road_points),
                               param("road.ln_g"), param("road.ln_b"));
  Var trunk = concat_cols(t, {obj_ln, road_ln, speed});
  return step_trunk(t, trunk, hidden);
}

TapedPolicy::StepOut TapedPolicy::step_trunk(Tape& t, Var trunk, Var hidden) const {
  Var z = vsigmoid(t, add_row(t, add(t, matmul(t, trunk, param("gru.wz")),
                                     matmul(t, hidden, param("gru.uz"))),
                              param("gru.bz")));
  Var r = vsigmoid(t, add_row(t, add(t, matmul(t, trunk, param("gru.wr")),
                                     matmul(t, hidden, param("gru.ur"))),
                              param("gru.br")));
  Var hn = add_row(t, matmul(t, hidden, param("gru.un")), param("gru.bhn"));
  Var xn = add_row(t, matmul(t, trunk, param("gru.wn")), param("gru.bin"));
  Var cand = vtanh(t, add(t, xn, mul(t, r, hn)));
  Var h_new = add(t, mul(t, z, hidden), mul(t, affine(t, z, -1.0, 1.0), cand));

  StepOut out;
  out.hidden = h_new;
  out.logits = add_row(t, matmul(t, h_new, param("act.w")), param("act.b"));
  Var vh = dense_taped(t, h_new, param("val.l1.w"), param("val.l1.b"), true);
  out.value = add_row(t, matmul(t, vh, param("val.l2.w")), param("val.l2.b"));
  return out;
}

TapedPolicy::StepOut TapedPolicy::step_flat(Tape& t, Var features, Var hidden) const {
  require(cfg_.encoder == EncoderKind::kFlat, "step_flat: config is not a flat encoder");
  Var h2 = dense_taped(t, dense_taped(t, features, param("enc.l1.w"), param("enc.l1.b"), true),
                       param("enc.l2.w"), param("enc.l2.b"), true);
  Var ln = layernorm_rows(t, h2, param("enc.ln_g"), param("enc.ln_b"));
  return step_trunk(t, ln, hidden);
}

int sample_action(const Matrix& logits, int row, Rng& rng) {
  const double* r = logits.row(row);
  double mx = r[0];
  for (int j = 1; j < logits.cols; ++j) mx = std::max(mx, r[j]);
  double total = 0.0;
  for (int j = 0; j < logits.cols; ++j) total += std::exp(r[j] - mx);
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (int j = 0; j < logits.cols; ++j) {
    acc += std::exp(r[j] - mx);
    if (u < acc) return j;
  }
  return logits.cols - 1;
}

int greedy_action(const Matrix& logits, int row) {
  const double* r = logits.row(row);
  int best = 0;
  for (int j = 1; j < logits.cols; ++j)
    if (r[j] > r[best]) best = j;
  return best;
}

double action_log_prob(const Matrix& logits, int row, int action) {
  const double* r = logits.row(row);
  double mx = r[0];
  for (int j = 1; j < logits.cols; ++j) mx = std::max(mx, r[j]);
  double lse = 0.0;
  for (int j = 0; j < logits.cols; ++j) lse += std::exp(r[j] - mx);
  lse = mx + std::log(lse);
  return r[action] - lse;
}

}  // namespace gaplab
