#pragma once

#include <vector>

#include "gaplab/nn/matrix.hpp"

namespace gaplab {

enum class OpKind {
  kLeaf,
  kConst,
  kMatmul,
  kAdd,
  kSub,
  kMul,
  kAddRow,
  kMulRows,
  kAffine,
  kTanh,
  kSigmoid,
  kExp,
  kLogSoftmaxRows,
  kPickCols,
  kConcatCols,
  kSegmentMean,
  kSegmentMax,
  kLayerNormRows,
  kSum,
  kMean,
  kMinElem,
  kClamp,
};

struct TapeNode {
  OpKind kind = OpKind::kConst;
  int a = -1;
  int b = -1;
  int c = -1;                // third input (layernorm bias)
  std::vector<int> extras;   // concat inputs
  Matrix value;
  Matrix grad;
  bool needs_grad = false;
  double alpha = 0.0;        // affine scale / clamp lo
  double beta = 0.0;         // affine shift / clamp hi
  std::vector<int> indices;  // pick_cols targets / segment_max argmax rows
  std::vector<double> aux;   // layernorm (mean, inv_std) / segment_mean counts
  int seg_groups = 0;
  int seg_block = 0;
};

}  // namespace gaplab
