#pragma once

#include <cstddef>
#include <functional>

namespace gaplab {

/// Runtime switch between the OpenMP kernels and their serial reference
/// implementations. Every parallel loop in the project writes to disjoint
/// per-index slots, so both paths produce bit-identical results; the tests
/// assert that and the bench tool times the two against each other.
namespace parallel {

/// Global thread budget. 0 = library default (OpenMP max). 1 = serial path.
void set_threads(int n);
int threads();

/// True when loops should take the OpenMP path.
bool enabled();

}  // namespace parallel

/// Index-parallel loop. fn(i) must only touch state owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Serial reference loop, kept for testing and benchmarking the kernels.
void serial_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gaplab
