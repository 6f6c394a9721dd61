#include "gaplab/nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaplab/common/error.hpp"
#include "gaplab/nn/kernels.hpp"

namespace gaplab {

namespace rawops {

void add_inplace(Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "add: shape mismatch " + a.shape_str() + " vs " + b.shape_str());
  for (std::size_t i = 0; i < a.size(); ++i) a.data[i] += b.data[i];
}

void sub_into(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.same_shape(b), "sub: shape mismatch " + a.shape_str() + " vs " + b.shape_str());
  out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] -= b.data[i];
}

void mul_into(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.same_shape(b), "mul: shape mismatch " + a.shape_str() + " vs " + b.shape_str());
  out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= b.data[i];
}

void add_row_inplace(Matrix& a, const Matrix& row) {
  require(row.rows == 1 && row.cols == a.cols,
          "add_row: want [1x" + std::to_string(a.cols) + "], got " + row.shape_str());
  for (int i = 0; i < a.rows; ++i) {
    double* r = a.row(i);
    for (int j = 0; j < a.cols; ++j) r[j] += row.data[static_cast<std::size_t>(j)];
  }
}

void mul_rows_inplace(Matrix& a, const Matrix& col) {
  require(col.rows == a.rows && col.cols == 1,
          "mul_rows: want [" + std::to_string(a.rows) + "x1], got " + col.shape_str());
  for (int i = 0; i < a.rows; ++i) {
    const double s = col.data[static_cast<std::size_t>(i)];
    double* r = a.row(i);
    for (int j = 0; j < a.cols; ++j) r[j] *= s;
  }
}

void affine_inplace(Matrix& a, double alpha, double beta) {
  for (double& v : a.data) v = alpha * v + beta;
}

void tanh_inplace(Matrix& a) {
  for (double& v : a.data) v = std::tanh(v);
}

void sigmoid_inplace(Matrix& a) {
  for (double& v : a.data) v = 1.0 / (1.0 + std::exp(-v));
}

void exp_inplace(Matrix& a) {
  for (double& v : a.data) v = std::exp(v);
}

void log_softmax_rows(const Matrix& a, Matrix& out) {
  out = a;
  for (int i = 0; i < out.rows; ++i) {
    double* r = out.row(i);
    double mx = r[0];
    for (int j = 1; j < out.cols; ++j) mx = std::max(mx, r[j]);
    double lse = 0.0;
    for (int j = 0; j < out.cols; ++j) lse += std::exp(r[j] - mx);
    lse = mx + std::log(lse);
    for (int j = 0; j < out.cols; ++j) r[j] -= lse;
  }
}

void layernorm_rows(const Matrix& x, const Matrix& gain, const Matrix& bias, Matrix& out,
                    std::vector<double>* aux) {
  require(gain.rows == 1 && gain.cols == x.cols && bias.rows == 1 && bias.cols == x.cols,
          "layernorm: gain/bias must be [1x" + std::to_string(x.cols) + "]");
  constexpr double kEps = 1e-5;
  out = x;
  if (aux) aux->assign(static_cast<std::size_t>(x.rows) * 2, 0.0);
  for (int i = 0; i < x.rows; ++i) {
    const double* xi = x.row(i);
    double mean = 0.0;
    for (int j = 0; j < x.cols; ++j) mean += xi[j];
    mean /= x.cols;
    double var = 0.0;
    for (int j = 0; j < x.cols; ++j) var += (xi[j] - mean) * (xi[j] - mean);
    var /= x.cols;
    const double inv = 1.0 / std::sqrt(var + kEps);
    if (aux) {
      (*aux)[static_cast<std::size_t>(i) * 2] = mean;
      (*aux)[static_cast<std::size_t>(i) * 2 + 1] = inv;
    }
    double* oi = out.row(i);
    for (int j = 0; j < x.cols; ++j)
      oi[j] = (xi[j] - mean) * inv * gain.data[static_cast<std::size_t>(j)] +
              bias.data[static_cast<std::size_t>(j)];
  }
}

void segment_mean(const Matrix& a, const Matrix& mask, int groups, int block, Matrix& out,
                  std::vector<double>* counts) {
  require(a.rows == groups * block, "segment_mean: rows != groups * block");
  require(mask.rows == a.rows && mask.cols == 1, "segment_mean: mask must be [rows x 1]");
  out = Matrix(groups, a.cols);
  if (counts) counts->assign(static_cast<std::size_t>(groups), 0.0);
  for (int g = 0; g < groups; ++g) {
    double cnt = 0.0;
    double* og = out.row(g);
    for (int s = 0; s < block; ++s) {
      const int r = g * block + s;
      if (mask.data[static_cast<std::size_t>(r)] == 0.0) continue;
      cnt += 1.0;
      const double* ar = a.row(r);
      for (int j = 0; j < a.cols; ++j) og[j] += ar[j];
    }
    if (cnt > 0.0) {
      const double inv = 1.0 / cnt;
      for (int j = 0; j < a.cols; ++j) og[j] *= inv;
    }
    if (counts) (*counts)[static_cast<std::size_t>(g)] = cnt;
  }
}

void segment_max(const Matrix& a, const Matrix& mask, int groups, int block, Matrix& out,
                 std::vector<int>* argmax) {
  require(a.rows == groups * block, "segment_max: rows != groups * block");
  require(mask.rows == a.rows && mask.cols == 1, "segment_max: mask must be [rows x 1]");
  out = Matrix(groups, a.cols);
  if (argmax) argmax->assign(static_cast<std::size_t>(groups) * a.cols, -1);
  for (int g = 0; g < groups; ++g) {
    double* og = out.row(g);
    bool any = false;
    for (int s = 0; s < block; ++s) {
      const int r = g * block + s;
      if (mask.data[static_cast<std::size_t>(r)] == 0.0) continue;
      const double* ar = a.row(r);
      if (!any) {
        for (int j = 0; j < a.cols; ++j) {
          og[j] = ar[j];
          if (argmax) (*argmax)[static_cast<std::size_t>(g) * a.cols + j] = r;
        }
        any = true;
      } else {
        for (int j = 0; j < a.cols; ++j) {
          if (ar[j] > og[j]) {
            og[j] = ar[j];
            if (argmax) (*argmax)[static_cast<std::size_t>(g) * a.cols + j] = r;
          }
        }
      }
    }
  }
}

}  // namespace rawops

Var Tape::emplace(TapeNode n) {
  require(!backward_done_, "tape: graph is frozen after backward");
  nodes_.push_back(std::move(n));
  return static_cast<Var>(nodes_.size() - 1);
}

Var Tape::leaf(const Matrix& m) {
  TapeNode n;
  n.kind = OpKind::kLeaf;
  n.value = m;
  n.needs_grad = true;
  return emplace(std::move(n));
}

Var Tape::constant(Matrix m) {
  TapeNode n;
  n.kind = OpKind::kConst;
  n.value = std::move(m);
  n.needs_grad = false;
  return emplace(std::move(n));
}

const Matrix& Tape::value(Var v) const { return node(v).value; }

const Matrix& Tape::grad(Var v) const {
  require(backward_done_, "tape: gradients are available only after backward");
  const TapeNode& n = node(v);
  if (n.grad.rows == 0) {
    const_cast<Tape*>(this)->zero_grad_ = Matrix(n.value.rows, n.value.cols);
    return zero_grad_;
  }
  return n.grad;
}

namespace {

Matrix& ensure_grad(TapeNode& n) {
  if (n.grad.rows == 0) n.grad = Matrix(n.value.rows, n.value.cols);
  return n.grad;
}

}  // namespace

void Tape::backward(Var loss) {
  require(!backward_done_, "tape: backward already run on this tape (accumulation disabled)");
  backward_done_ = true;
  TapeNode& top = node(loss);
  require(top.value.rows == 1 && top.value.cols == 1,
          "tape: backward requires a scalar loss, got " + top.value.shape_str());
  require(top.needs_grad, "tape: loss does not depend on any leaf");
  ensure_grad(top).data[0] = 1.0;

  for (Var v = loss; v >= 0; --v) {
    TapeNode& n = node(v);
    if (!n.needs_grad || n.grad.rows == 0) continue;
    const Matrix& g = n.grad;
    auto in_grad = [&](int idx) -> Matrix* {
      if (idx < 0) return nullptr;
      TapeNode& in = node(idx);
      if (!in.needs_grad) return nullptr;
      return &ensure_grad(in);
    };
    switch (n.kind) {
      case OpKind::kLeaf:
      case OpKind::kConst:
        break;
      case OpKind::kMatmul: {
        if (Matrix* da = in_grad(n.a)) gemm_nt(g, node(n.b).value, *da, true);
        if (Matrix* db = in_grad(n.b)) gemm_tn(node(n.a).value, g, *db, true);
        break;
      }
      case OpKind::kAdd: {
        if (Matrix* da = in_grad(n.a)) rawops::add_inplace(*da, g);
        if (Matrix* db = in_grad(n.b)) rawops::add_inplace(*db, g);
        break;
      }
      case OpKind::kSub: {
        if (Matrix* da = in_grad(n.a)) rawops::add_inplace(*da, g);
        if (Matrix* db = in_grad(n.b))
          for (std::size_t i = 0; i < g.size(); ++i) db->data[i] -= g.data[i];
        break;
      }
      case OpKind::kMul: {
        if (Matrix* da = in_grad(n.a)) {
          const Matrix& bv = node(n.b).value;
          for (std::size_t i = 0; i < g.size(); ++i) da->data[i] += g.data[i] * bv.data[i];
        }
        if (Matrix* db = in_grad(n.b)) {
          const Matrix& av = node(n.a).value;
          for (std::size_t i = 0; i < g.size(); ++i) db->data[i] += g.data[i] * av.data[i];
        }
        break;
      }
      case OpKind::kAddRow: {
        if (Matrix* da = in_grad(n.a)) rawops::add_inplace(*da, g);
        if (Matrix* dv = in_grad(n.b)) {
          for (int i = 0; i < g.rows; ++i) {
            const double* gr = g.row(i);
            for (int j = 0; j < g.cols; ++j) dv->data[static_cast<std::size_t>(j)] += gr[j];
          }
        }
        break;
      }
      case OpKind::kMulRows: {
        const Matrix& av = node(n.a).value;
        const Matrix& sv = node(n.b).value;
        if (Matrix* da = in_grad(n.a)) {
          for (int i = 0; i < g.rows; ++i) {
            const double s = sv.data[static_cast<std::size_t>(i)];
            const double* gr = g.row(i);
            double* dr = da->row(i);
            for (int j = 0; j < g.cols; ++j) dr[j] += gr[j] * s;
          }
        }
        if (Matrix* ds = in_grad(n.b)) {
          for (int i = 0; i < g.rows; ++i) {
            const double* gr = g.row(i);
            const double* ar = av.row(i);
            double acc = 0.0;
            for (int j = 0; j < g.cols; ++j) acc += gr[j] * ar[j];
            ds->data[static_cast<std::size_t>(i)] += acc;
          }
        }
        break;
      }
      case OpKind::kAffine: {
        if (Matrix* da = in_grad(n.a))
          for (std::size_t i = 0; i < g.size(); ++i) da->data[i] += n.alpha * g.data[i];
        break;
      }
      case OpKind::kTanh: {
        if (Matrix* da = in_grad(n.a)) {
          const Matrix& y = n.value;
          for (std::size_t i = 0; i < g.size(); ++i)
            da->data[i] += g.data[i] * (1.0 - y.data[i] * y.data[i]);
        }
        break;
      }
      case OpKind::kSigmoid: {
        if (Matrix* da = in_grad(n.a)) {
          const Matrix& y = n.value;
          for (std::size_t i = 0; i < g.size(); ++i)
            da->data[i] += g.data[i] * y.data[i] * (1.0 - y.data[i]);
        }
        break;
      }
      case OpKind::kExp: {
        if (Matrix* da = in_grad(n.a)) {
          const Matrix& y = n.value;
          for (std::size_t i = 0; i < g.size(); ++i) da->data[i] += g.data[i] * y.data[i];
        }
        break;
      }
      case OpKind::kLogSoftmaxRows: {
        if (Matrix* da = in_grad(n.a)) {
          const Matrix& y = n.value;
          for (int i = 0; i < g.rows; ++i) {
            const double* gr = g.row(i);
            const double* yr = y.row(i);
            double gsum = 0.0;
            for (int j = 0; j < g.cols; ++j) gsum += gr[j];
            double* dr = da->row(i);
            for (int j = 0; j < g.cols; ++j) dr[j] += gr[j] - std::exp(yr[j]) * gsum;
          }
        }
        break;
      }
      case OpKind::kPickCols: {
        if (Matrix* da = in_grad(n.a)) {
          for (int i = 0; i < g.rows; ++i)
            da->at(i, n.indices[static_cast<std::size_t>(i)]) += g.at(i, 0);
        }
        break;
      }
      case OpKind::kConcatCols: {
        int offset = 0;
        for (int part : n.extras) {
          TapeNode& in = node(part);
          const int w = in.value.cols;
          if (in.needs_grad) {
            Matrix& dp = ensure_grad(in);
            for (int i = 0; i < g.rows; ++i) {
              const double* gr = g.row(i) + offset;
              double* dr = dp.row(i);
              for (int j = 0; j < w; ++j) dr[j] += gr[j];
            }
          }
          offset += w;
        }
        break;
      }
      case OpKind::kSegmentMean: {
        if (Matrix* da = in_grad(n.a)) {
          const Matrix& mask = node(n.b).value;
          for (int grp = 0; grp < n.seg_groups; ++grp) {
            const double cnt = n.aux[static_cast<std::size_t>(grp)];
            if (cnt == 0.0) continue;
            const double inv = 1.0 / cnt;
            const double* gr = g.row(grp);
            for (int s = 0; s < n.seg_block; ++s) {
              const int r = grp * n.seg_block + s;
              if (mask.data[static_cast<std::size_t>(r)] == 0.0) continue;
              double* dr = da->row(r);
              for (int j = 0; j < g.cols; ++j) dr[j] += gr[j] * inv;
            }
          }
        }
        break;
      }
      case OpKind::kSegmentMax: {
        if (Matrix* da = in_grad(n.a)) {
          for (int grp = 0; grp < n.seg_groups; ++grp) {
            const double* gr = g.row(grp);
            for (int j = 0; j < g.cols; ++j) {
              const int r = n.indices[static_cast<std::size_t>(grp) * g.cols + j];
              if (r >= 0) da->at(r, j) += gr[j];
            }
          }
        }
        break;
      }
      case OpKind::kLayerNormRows: {
        const Matrix& x = node(n.a).value;
        const Matrix& gain = node(n.b).value;
        const int m = x.cols;
        Matrix* da = in_grad(n.a);
        Matrix* dg = in_grad(n.b);
        Matrix* db = in_grad(n.c);
        for (int i = 0; i < x.rows; ++i) {
          const double mean = n.aux[static_cast<std::size_t>(i) * 2];
          const double inv = n.aux[static_cast<std::size_t>(i) * 2 + 1];
          const double* xi = x.row(i);
          const double* gr = g.row(i);
          double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
          for (int j = 0; j < m; ++j) {
            const double xhat = (xi[j] - mean) * inv;
            const double dxhat = gr[j] * gain.data[static_cast<std::size_t>(j)];
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xhat;
            if (dg) dg->data[static_cast<std::size_t>(j)] += gr[j] * xhat;
            if (db) db->data[static_cast<std::size_t>(j)] += gr[j];
          }
          if (da) {
            double* dr = da->row(i);
            for (int j = 0; j < m; ++j) {
              const double xhat = (xi[j] - mean) * inv;
              const double dxhat = gr[j] * gain.data[static_cast<std::size_t>(j)];
              dr[j] += inv * (dxhat - (sum_dxhat + xhat * sum_dxhat_xhat) / m);
            }
          }
        }
        break;
      }
      case OpKind::kSum: {
        if (Matrix* da = in_grad(n.a)) {
          const double s = g.data[0];
          for (double& v : da->data) v += s;
        }
        break;
      }
      case OpKind::kMean: {
        if (Matrix* da = in_grad(n.a)) {
          const double s = g.data[0] / static_cast<double>(da->size());
          for (double& v : da->data) v += s;
        }
        break;
      }
      case OpKind::kMinElem: {
        const Matrix& av = node(n.a).value;
        const Matrix& bv = node(n.b).value;
        Matrix* da = in_grad(n.a);
        Matrix* db = in_grad(n.b);
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (av.data[i] <= bv.data[i]) {
            if (da) da->data[i] += g.data[i];
          } else if (db) {
            db->data[i] += g.data[i];
          }
        }
        break;
      }
      case OpKind::kClamp: {
        if (Matrix* da = in_grad(n.a)) {
          const Matrix& x = node(n.a).value;
          for (std::size_t i = 0; i < g.size(); ++i)
            if (x.data[i] >= n.alpha && x.data[i] <= n.beta) da->data[i] += g.data[i];
        }
        break;
      }
    }
  }
}

namespace {

TapeNode unary(Tape& t, OpKind kind, Var a) {
  TapeNode n;
  n.kind = kind;
  n.a = a;
  n.needs_grad = t.node(a).needs_grad;
  return n;
}

TapeNode binary(Tape& t, OpKind kind, Var a, Var b) {
  TapeNode n;
  n.kind = kind;
  n.a = a;
  n.b = b;
  n.needs_grad = t.node(a).needs_grad || t.node(b).needs_grad;
  return n;
}

}  // namespace

Var matmul(Tape& t, Var a, Var b) {
  TapeNode n = binary(t, OpKind::kMatmul, a, b);
  n.value = Matrix(t.value(a).rows, t.value(b).cols);
  gemm_nn(t.value(a), t.value(b), n.value);
  return t.emplace(std::move(n));
}

Var add(Tape& t, Var a, Var b) {
  TapeNode n = binary(t, OpKind::kAdd, a, b);
  n.value = t.value(a);
  rawops::add_inplace(n.value, t.value(b));
  return t.emplace(std::move(n));
}

Var sub(Tape& t, Var a, Var b) {
  TapeNode n = binary(t, OpKind::kSub, a, b);
  rawops::sub_into(t.value(a), t.value(b), n.value);
  return t.emplace(std::move(n));
}

Var mul(Tape& t, Var a, Var b) {
  TapeNode n = binary(t, OpKind::kMul, a, b);
  rawops::mul_into(t.value(a), t.value(b), n.value);
  return t.emplace(std::move(n));
}

Var add_row(Tape& t, Var a, Var v) {
  TapeNode n = binary(t, OpKind::kAddRow, a, v);
  n.value = t.value(a);
  rawops::add_row_inplace(n.value, t.value(v));
  return t.emplace(std::move(n));
}

Var mul_rows(Tape& t, Var a, Var s) {
  TapeNode n = binary(t, OpKind::kMulRows, a, s);
  n.value = t.value(a);
  rawops::mul_rows_inplace(n.value, t.value(s));
  return t.emplace(std::move(n));
}

Var affine(Tape& t, Var a, double alpha, double beta) {
  TapeNode n = unary(t, OpKind::kAffine, a);
  n.alpha = alpha;
  n.beta = beta;
  n.value = t.value(a);
  rawops::affine_inplace(n.value, alpha, beta);
  return t.emplace(std::move(n));
}

Var vtanh(Tape& t, Var a) {
  TapeNode n = unary(t, OpKind::kTanh, a);
  n.value = t.value(a);
  rawops::tanh_inplace(n.value);
  return t.emplace(std::move(n));
}

Var vsigmoid(Tape& t, Var a) {
  TapeNode n = unary(t, OpKind::kSigmoid, a);
  n.value = t.value(a);
  rawops::sigmoid_inplace(n.value);
  return t.emplace(std::move(n));
}

Var vexp(Tape& t, Var a) {
  TapeNode n = unary(t, OpKind::kExp, a);
  n.value = t.value(a);
  rawops::exp_inplace(n.value);
  return t.emplace(std::move(n));
}

Var log_softmax_rows(Tape& t, Var a) {
  TapeNode n = unary(t, OpKind::kLogSoftmaxRows, a);
  rawops::log_softmax_rows(t.value(a), n.value);
  return t.emplace(std::move(n));
}

Var pick_cols(Tape& t, Var a, std::vector<int> idx) {
  const Matrix& av = t.value(a);
  require(static_cast<int>(idx.size()) == av.rows, "pick_cols: one index per row required");
  TapeNode n = unary(t, OpKind::kPickCols, a);
  n.value = Matrix(av.rows, 1);
  for (int i = 0; i < av.rows; ++i) {
    require(idx[static_cast<std::size_t>(i)] >= 0 && idx[static_cast<std::size_t>(i)] < av.cols,
            "pick_cols: index out of range");
    n.value.at(i, 0) = av.at(i, idx[static_cast<std::size_t>(i)]);
  }
  n.indices = std::move(idx);
  return t.emplace(std::move(n));
}

Var concat_cols(Tape& t, const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  TapeNode n;
  n.kind = OpKind::kConcatCols;
  n.extras = parts;
  const int rows = t.value(parts[0]).rows;
  int cols = 0;
  for (Var p : parts) {
    require(t.value(p).rows == rows, "concat_cols: row mismatch");
    cols += t.value(p).cols;
    n.needs_grad = n.needs_grad || t.node(p).needs_grad;
  }
  n.value = Matrix(rows, cols);
  int offset = 0;
  for (Var p : parts) {
    const Matrix& pv = t.value(p);
    for (int i = 0; i < rows; ++i)
      std::copy(pv.row(i), pv.row(i) + pv.cols, n.value.row(i) + offset);
    offset += pv.cols;
  }
  return t.emplace(std::move(n));
}

Var segment_mean(Tape& t, Var a, Var mask, int groups, int block) {
  TapeNode n = binary(t, OpKind::kSegmentMean, a, mask);
  n.seg_groups = groups;
  n.seg_block = block;
  rawops::segment_mean(t.value(a), t.value(mask), groups, block, n.value, &n.aux);
  return t.emplace(std::move(n));
}

Var segment_max(Tape& t, Var a, Var mask, int groups, int block) {
  TapeNode n = binary(t, OpKind::kSegmentMax, a, mask);
  n.seg_groups = groups;
  n.seg_block = block;
  rawops::segment_max(t.value(a), t.value(mask), groups, block, n.value, &n.indices);
  return t.emplace(std::move(n));
}

Var layernorm_rows(Tape& t, Var x, Var gain, Var bias) {
  TapeNode n = binary(t, OpKind::kLayerNormRows, x, gain);
  n.c = bias;
  n.needs_grad = n.needs_grad || t.node(bias).needs_grad;
  rawops::layernorm_rows(t.value(x), t.value(gain), t.value(bias), n.value, &n.aux);
  return t.emplace(std::move(n));
}

Var vsum(Tape& t, Var a) {
  TapeNode n = unary(t, OpKind::kSum, a);
  n.value = Matrix(1, 1);
  double s = 0.0;
  for (double v : t.value(a).data) s += v;
  n.value.data[0] = s;
  return t.emplace(std::move(n));
}

Var vmean(Tape& t, Var a) {
  TapeNode n = unary(t, OpKind::kMean, a);
  require(t.value(a).size() > 0, "mean: empty matrix");
  n.value = Matrix(1, 1);
  double s = 0.0;
  for (double v : t.value(a).data) s += v;
  n.value.data[0] = s / static_cast<double>(t.value(a).size());
  return t.emplace(std::move(n));
}

Var min_elem(Tape& t, Var a, Var b) {
  TapeNode n = binary(t, OpKind::kMinElem, a, b);
  const Matrix& av = t.value(a);
  const Matrix& bv = t.value(b);
  require(av.same_shape(bv), "min_elem: shape mismatch");
  n.value = av;
  for (std::size_t i = 0; i < n.value.size(); ++i)
    n.value.data[i] = std::min(av.data[i], bv.data[i]);
  return t.emplace(std::move(n));
}

Var clamp(Tape& t, Var a, double lo, double hi) {
  require(lo <= hi, "clamp: lo > hi");
  TapeNode n = unary(t, OpKind::kClamp, a);
  n.alpha = lo;
  n.beta = hi;
  n.value = t.value(a);
  for (double& v : n.value.data) v = std::min(std::max(v, lo), hi);
  return t.emplace(std::move(n));
}

}  // namespace gaplab
