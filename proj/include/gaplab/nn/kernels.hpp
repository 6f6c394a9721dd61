#pragma once

#include "gaplab/nn/matrix.hpp"

namespace gaplab {

// Matrix-product kernels. Each has a plain serial implementation and an
// OpenMP one parallelized over output rows; the public entry points pick
// between them at runtime. The serial versions are the reference: both must
// produce bit-identical results (each output element is an independent dot
// product accumulated in the same order).

/// out = a * b, accumulating into out when accumulate is true.
void gemm_nn(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate = false);
/// out = a * b^T.
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate = false);
/// out = a^T * b.
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate = false);

void gemm_nn_serial(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate = false);
void gemm_nt_serial(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate = false);
void gemm_tn_serial(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate = false);

}  // namespace gaplab
