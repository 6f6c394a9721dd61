// Timing harness for the matrix kernels: serial reference vs the OpenMP
// entry points, with a bitwise equality column. Shapes mirror the hot paths
// (per-step batched GRU and encoder products and their backward variants).

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "gaplab/common/parallel.hpp"
#include "gaplab/common/rng.hpp"
#include "gaplab/nn/kernels.hpp"

using namespace gaplab;

namespace {

Matrix random_matrix(int r, int c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform(-1.0, 1.0);
  return m;
}

using KernelFn = void (*)(const Matrix&, const Matrix&, Matrix&, bool);

double time_ms(KernelFn fn, const Matrix& a, const Matrix& b, Matrix& out, int reps) {
  fn(a, b, out, false);  // warm up
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn(a, b, out, false);
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

struct Case {
  const char* name;
  KernelFn serial;
  KernelFn parallel;
  int ar, ac, br, bc, outr, outc;
};

}  // namespace

int main(int argc, char** argv) {
  int reps = 20;
  if (argc > 1) reps = std::stoi(argv[1]);
  Rng rng(7);

  // a-shape, b-shape, out-shape per kernel transpose convention.
  const std::vector<Case> cases = {
      {"gemm_nn 512x64 * 64x64", gemm_nn_serial, gemm_nn, 512, 64, 64, 64, 512, 64},
      {"gemm_nn 128x128 * 128x128", gemm_nn_serial, gemm_nn, 128, 128, 128, 128, 128, 128},
      {"gemm_nn 2048x64 * 64x256", gemm_nn_serial, gemm_nn, 2048, 64, 64, 256, 2048, 256},
      {"gemm_nt 512x64 * (512x64)^T", gemm_nt_serial, gemm_nt, 512, 64, 512, 64, 512, 512},
      {"gemm_tn (512x64)^T * 512x128", gemm_tn_serial, gemm_tn, 512, 64, 512, 128, 64, 128},
  };

  std::printf("threads=%d\n", parallel::threads());
  std::printf("%-32s %12s %12s %9s %14s\n", "kernel", "serial_ms", "parallel_ms", "speedup",
              "max_abs_diff");
  for (const auto& c : cases) {
    const Matrix a = random_matrix(c.ar, c.ac, rng);
    const Matrix b = random_matrix(c.br, c.bc, rng);
    Matrix out_serial(c.outr, c.outc), out_parallel(c.outr, c.outc);
    const double t_serial = time_ms(c.serial, a, b, out_serial, reps);
    const double t_parallel = time_ms(c.parallel, a, b, out_parallel, reps);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < out_serial.size(); ++i) {
      const double d = out_serial.data[i] - out_parallel.data[i];
      max_diff = std::max(max_diff, d < 0 ? -d : d);
    }
    std::printf("%-32s %12.4f %12.4f %9.2f %14g\n", c.name, t_serial, t_parallel,
                t_serial / t_parallel, max_diff);
  }
  return 0;
}
