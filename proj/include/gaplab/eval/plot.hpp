#pragma once

#include <string>
#include <vector>

#include "gaplab/common/csv.hpp"

namespace gaplab {

/// One plotted configuration: x positions with across-seed mean and 95% CI
/// half-width per position.
struct CurveSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> ci;
};

/// Reduce per-seed training logs (same schema, same update column) to a
/// curve. Throws when logs is empty, a column is missing, or the logs
/// disagree on row count or x values; errors name the log index and row.
CurveSeries curve_from_logs(const std::string& label, const std::vector<csv::Table>& logs,
                            const std::string& x_col, const std::string& y_col);

/// Learning-curve figure: per series a mean polyline plus a CI band polygon.
/// Data elements live inside a group whose transform maps data space to
/// screen space, so the coordinates in the SVG text are the data values
/// themselves (shortest round-trip formatting); output is byte-deterministic.
std::string learning_curve_svg(const std::vector<CurveSeries>& series, const std::string& title,
                               const std::string& x_label, const std::string& y_label);

/// One cluster of bars (e.g. one metric), one value per series label.
struct BarGroup {
  std::string label;
  std::vector<double> values;
  std::vector<double> ci;
};

/// Grouped bars with error whiskers. Each rect carries its source numbers in
/// data-value / data-ci attributes; output is byte-deterministic.
std::string grouped_bar_svg(const std::vector<std::string>& series_labels,
                            const std::vector<BarGroup>& groups, const std::string& title,
                            const std::string& y_label);

}  // namespace gaplab
