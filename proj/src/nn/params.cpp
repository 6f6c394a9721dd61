#include "gaplab/nn/params.hpp"

#include "gaplab/common/error.hpp"

namespace gaplab {

Matrix& Params::add(const std::string& name, int rows, int cols) {
  require(!has(name), "params: duplicate tensor name " + name);
  items.emplace_back(name, Matrix(rows, cols));
  return items.back().second;
}

Matrix& Params::get(const std::string& name) {
  for (auto& [n, m] : items)
    if (n == name) return m;
  throw Error("params: no tensor named " + name);
}

const Matrix& Params::get(const std::string& name) const {
  for (const auto& [n, m] : items)
    if (n == name) return m;
  throw Error("params: no tensor named " + name);
}

bool Params::has(const std::string& name) const {
  for (const auto& [n, m] : items)
    if (n == name) return true;
  return false;
}

std::size_t Params::total_size() const {
  std::size_t n = 0;
  for (const auto& [name, m] : items) n += m.size();
  return n;
}

std::vector<double> Params::flatten() const {
  std::vector<double> flat;
  flat.reserve(total_size());
  for (const auto& [name, m] : items) flat.insert(flat.end(), m.data.begin(), m.data.end());
  return flat;
}

void Params::unflatten(const std::vector<double>& flat) {
  require(flat.size() == total_size(),
          "params: flat vector has " + std::to_string(flat.size()) + " values, expected " +
              std::to_string(total_size()));
  std::size_t pos = 0;
  for (auto& [name, m] : items) {
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
              flat.begin() + static_cast<std::ptrdiff_t>(pos + m.size()), m.data.begin());
    pos += m.size();
  }
}

}  // namespace gaplab
