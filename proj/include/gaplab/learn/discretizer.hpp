#pragma once

#include "gaplab/core/types.hpp"

namespace gaplab {

/// Uniform bin grid over [lo, hi); values outside clamp to the edge bins.
struct AxisGrid {
  double lo = 0.0;
  double hi = 1.0;
  int bins = 1;

  double width() const { return (hi - lo) / bins; }
  double center(int i) const { return lo + (i + 0.5) * width(); }
  int index_of(double x, bool* saturated) const;
  void validate() const;
};

/// Maps continuous ego-frame pose displacements onto a joint vocabulary of
/// dx_bins * dy_bins * dtheta_bins action indices and back to bin centers.
/// The default grids factor 256 actions as 8 x 8 x 4 and put an exact zero
/// center on every axis, biased toward forward motion.
class ActionDiscretizer {
 public:
  ActionDiscretizer();
  ActionDiscretizer(AxisGrid dx, AxisGrid dy, AxisGrid dtheta);

  int actions() const { return dx_.bins * dy_.bins * dtheta_.bins; }
  /// saturated, when given, reports whether any axis fell outside its range.
  int discretize(const DeltaAction& a, bool* saturated = nullptr) const;
  DeltaAction undiscretize(int index) const;

  const AxisGrid& dx_grid() const { return dx_; }
  const AxisGrid& dy_grid() const { return dy_; }
  const AxisGrid& dtheta_grid() const { return dtheta_; }

 private:
  AxisGrid dx_;
  AxisGrid dy_;
  AxisGrid dtheta_;
};

}  // namespace gaplab
