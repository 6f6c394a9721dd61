#pragma once

#include <vector>

#include "gaplab/nn/matrix.hpp"
#include "gaplab/nn/tape_node.hpp"

namespace gaplab {

/// Raw forward routines shared by the recording (training) and plain
/// (rollout) code paths, so both produce bit-identical values.
namespace rawops {

void add_inplace(Matrix& a, const Matrix& b);
void sub_into(const Matrix& a, const Matrix& b, Matrix& out);
void mul_into(const Matrix& a, const Matrix& b, Matrix& out);
void add_row_inplace(Matrix& a, const Matrix& row);
void mul_rows_inplace(Matrix& a, const Matrix& col);
void affine_inplace(Matrix& a, double alpha, double beta);
void tanh_inplace(Matrix& a);
void sigmoid_inplace(Matrix& a);
void exp_inplace(Matrix& a);
void log_softmax_rows(const Matrix& a, Matrix& out);
/// aux, when given, receives (mean, inv_std) per row for the backward pass.
void layernorm_rows(const Matrix& x, const Matrix& gain, const Matrix& bias, Matrix& out,
                    std::vector<double>* aux);
/// Rows of `a` are grouped into `groups` consecutive blocks of `block` rows;
/// rows whose mask entry is zero are excluded. Empty groups pool to zero.
void segment_mean(const Matrix& a, const Matrix& mask, int groups, int block, Matrix& out,
                  std::vector<double>* counts);
void segment_max(const Matrix& a, const Matrix& mask, int groups, int block, Matrix& out,
                 std::vector<int>* argmax);

}  // namespace rawops

/// Handle to a node on a Tape.
using Var = int;

/// Reverse-mode autodiff over Matrix-valued nodes. Build a graph with the
/// free functions below, call backward exactly once on a 1x1 loss node, then
/// read gradients off leaf nodes. Gradient accumulation across backward
/// calls is disabled: a second backward on the same tape throws.
class Tape {
 public:
  /// Trainable input; gradient is available after backward.
  Var leaf(const Matrix& m);
  /// Non-trainable input (observations, masks, targets).
  Var constant(Matrix m);

  const Matrix& value(Var v) const;
  /// Gradient of the loss w.r.t. node v; zero matrix if v was unused.
  const Matrix& grad(Var v) const;

  void backward(Var loss);

  std::size_t node_count() const { return nodes_.size(); }

  // Graph construction (used by the op free functions).
  TapeNode& node(Var v) { return nodes_[static_cast<std::size_t>(v)]; }
  const TapeNode& node(Var v) const { return nodes_[static_cast<std::size_t>(v)]; }
  Var emplace(TapeNode n);

 private:
  std::vector<TapeNode> nodes_;
  bool backward_done_ = false;
  Matrix zero_grad_;
};

Var matmul(Tape& t, Var a, Var b);
Var add(Tape& t, Var a, Var b);
Var sub(Tape& t, Var a, Var b);
Var mul(Tape& t, Var a, Var b);
/// a + row vector v broadcast over rows of a.
Var add_row(Tape& t, Var a, Var v);
/// Each row of a scaled by the matching entry of column vector s.
Var mul_rows(Tape& t, Var a, Var s);
/// alpha * a + beta, elementwise.
Var affine(Tape& t, Var a, double alpha, double beta);
Var vtanh(Tape& t, Var a);
Var vsigmoid(Tape& t, Var a);
Var vexp(Tape& t, Var a);
Var log_softmax_rows(Tape& t, Var a);
/// out[i, 0] = a[i, idx[i]].
Var pick_cols(Tape& t, Var a, std::vector<int> idx);
Var concat_cols(Tape& t, const std::vector<Var>& parts);
Var segment_mean(Tape& t, Var a, Var mask, int groups, int block);
Var segment_max(Tape& t, Var a, Var mask, int groups, int block);
Var layernorm_rows(Tape& t, Var x, Var gain, Var bias);
Var vsum(Tape& t, Var a);
Var vmean(Tape& t, Var a);
Var min_elem(Tape& t, Var a, Var b);
Var clamp(Tape& t, Var a, double lo, double hi);

}  // namespace gaplab
