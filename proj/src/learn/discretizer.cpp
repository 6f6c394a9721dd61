#include "gaplab/learn/discretizer.hpp"

#include <cmath>

#include "gaplab/common/error.hpp"

namespace gaplab {

void AxisGrid::validate() const {
  require(bins > 0, "axis grid: bins must be positive");
  require(hi > lo, "axis grid: empty range");
}

int AxisGrid::index_of(double x, bool* saturated) const {
  if (saturated != nullptr && (x < lo || x > hi)) *saturated = true;
  const int i = static_cast<int>(std::floor((x - lo) / width()));
  return i < 0 ? 0 : (i >= bins ? bins - 1 : i);
}

ActionDiscretizer::ActionDiscretizer()
    : ActionDiscretizer(AxisGrid{-0.625, 1.375, 8}, AxisGrid{-0.28125, 0.21875, 8},
                        AxisGrid{-0.09375, 0.15625, 4}) {}

ActionDiscretizer::ActionDiscretizer(AxisGrid dx, AxisGrid dy, AxisGrid dtheta)
    : dx_(dx), dy_(dy), dtheta_(dtheta) {
  dx_.validate();
  dy_.validate();
  dtheta_.validate();
}

int ActionDiscretizer::discretize(const DeltaAction& a, bool* saturated) const {
  if (saturated != nullptr) *saturated = false;
  const int ix = dx_.index_of(a.dx, saturated);
  const int iy = dy_.index_of(a.dy, saturated);
  const int it = dtheta_.index_of(a.dtheta, saturated);
  return (ix * dy_.bins + iy) * dtheta_.bins + it;
}

DeltaAction ActionDiscretizer::undiscretize(int index) const {
  require(index >= 0 && index < actions(), "discretizer: action index out of range");
  const int it = index % dtheta_.bins;
  const int iy = (index / dtheta_.bins) % dy_.bins;
  const int ix = index / (dtheta_.bins * dy_.bins);
  return DeltaAction{dx_.center(ix), dy_.center(iy), dtheta_.center(it)};
}

}  // namespace gaplab
