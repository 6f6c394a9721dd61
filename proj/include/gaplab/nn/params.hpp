#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gaplab/nn/matrix.hpp"

namespace gaplab {

/// Ordered collection of named weight matrices. Insertion order defines the
/// layout of the flat vector view used by the optimizer and checkpoints.
struct Params {
  std::vector<std::pair<std::string, Matrix>> items;

  Matrix& add(const std::string& name, int rows, int cols);
  Matrix& get(const std::string& name);
  const Matrix& get(const std::string& name) const;
  bool has(const std::string& name) const;

  std::size_t total_size() const;
  /// Concatenation of all matrices in insertion order; round-trips bitwise
  /// through unflatten.
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& flat);
};

}  // namespace gaplab
