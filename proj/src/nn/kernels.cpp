#include "gaplab/nn/kernels.hpp"

#include "gaplab/common/error.hpp"
#include "gaplab/common/parallel.hpp"

namespace gaplab {

namespace {

void check_nn(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.cols == b.rows && out.rows == a.rows && out.cols == b.cols,
          "gemm_nn: shape mismatch " + a.shape_str() + " * " + b.shape_str() + " -> " +
              out.shape_str());
}

void check_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.cols == b.cols && out.rows == a.rows && out.cols == b.rows,
          "gemm_nt: shape mismatch " + a.shape_str() + " * " + b.shape_str() + "^T -> " +
              out.shape_str());
}

void check_tn(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.rows == b.rows && out.rows == a.cols && out.cols == b.cols,
          "gemm_tn: shape mismatch " + a.shape_str() + "^T * " + b.shape_str() + " -> " +
              out.shape_str());
}

// One output row of a * b: out_row += a_row * b, k-outer so the inner loop
// is a stride-1 axpy over b's rows.
inline void nn_row(const double* a_row, const Matrix& b, double* out_row, bool accumulate) {
  const int n = b.cols;
  if (!accumulate)
    for (int j = 0; j < n; ++j) out_row[j] = 0.0;
  for (int k = 0; k < b.rows; ++k) {
    const double aik = a_row[k];
    const double* b_row = b.row(k);
    for (int j = 0; j < n; ++j) out_row[j] += aik * b_row[j];
  }
}

// One output row of a * b^T: independent dot products, four-way partial sums
// to break the accumulation dependency chain.
inline void nt_row(const double* a_row, const Matrix& b, double* out_row, bool accumulate) {
  const int k_count = b.cols;
  for (int j = 0; j < b.rows; ++j) {
    const double* b_row = b.row(j);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    int k = 0;
    for (; k + 4 <= k_count; k += 4) {
      s0 += a_row[k] * b_row[k];
      s1 += a_row[k + 1] * b_row[k + 1];
      s2 += a_row[k + 2] * b_row[k + 2];
      s3 += a_row[k + 3] * b_row[k + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (; k < k_count; ++k) s += a_row[k] * b_row[k];
    out_row[j] = accumulate ? out_row[j] + s : s;
  }
}

// One output row of a^T * b (row index k of the result): sum over i of
// a[i][k] * b[i][:], again a stride-1 axpy inner loop.
inline void tn_row(const Matrix& a, const Matrix& b, int k, double* out_row, bool accumulate) {
  const int n = b.cols;
  if (!accumulate)
    for (int j = 0; j < n; ++j) out_row[j] = 0.0;
  for (int i = 0; i < a.rows; ++i) {
    const double aik = a.at(i, k);
    const double* b_row = b.row(i);
    for (int j = 0; j < n; ++j) out_row[j] += aik * b_row[j];
  }
}

constexpr std::size_t kParallelMinWork = 1u << 16;

bool use_parallel(std::size_t work) { return parallel::enabled() && work >= kParallelMinWork; }

}  // namespace

void gemm_nn_serial(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate) {
  check_nn(a, b, out);
  for (int i = 0; i < a.rows; ++i) nn_row(a.row(i), b, out.row(i), accumulate);
}

void gemm_nt_serial(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate) {
  check_nt(a, b, out);
  for (int i = 0; i < a.rows; ++i) nt_row(a.row(i), b, out.row(i), accumulate);
}

void gemm_tn_serial(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate) {
  check_tn(a, b, out);
  for (int k = 0; k < a.cols; ++k) tn_row(a, b, k, out.row(k), accumulate);
}

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate) {
  check_nn(a, b, out);
  const std::size_t work = static_cast<std::size_t>(a.rows) * a.cols * b.cols;
  if (!use_parallel(work)) {
    gemm_nn_serial(a, b, out, accumulate);
    return;
  }
  parallel_for(static_cast<std::size_t>(a.rows),
               [&](std::size_t i) { nn_row(a.row(static_cast<int>(i)), b, out.row(static_cast<int>(i)), accumulate); });
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate) {
  check_nt(a, b, out);
  const std::size_t work = static_cast<std::size_t>(a.rows) * a.cols * b.rows;
  if (!use_parallel(work)) {
    gemm_nt_serial(a, b, out, accumulate);
    return;
  }
  parallel_for(static_cast<std::size_t>(a.rows),
               [&](std::size_t i) { nt_row(a.row(static_cast<int>(i)), b, out.row(static_cast<int>(i)), accumulate); });
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate) {
  check_tn(a, b, out);
  const std::size_t work = static_cast<std::size_t>(a.rows) * a.cols * b.cols;
  if (!use_parallel(work)) {
    gemm_tn_serial(a, b, out, accumulate);
    return;
  }
  parallel_for(static_cast<std::size_t>(a.cols),
               [&](std::size_t k) { tn_row(a, b, static_cast<int>(k), out.row(static_cast<int>(k)), accumulate); });
}

}  // namespace gaplab
