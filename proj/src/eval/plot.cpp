#include "gaplab/eval/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gaplab/common/error.hpp"
#include "gaplab/common/stats.hpp"

namespace gaplab {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 44.0;
constexpr double kBottom = 52.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad(double frac) {
    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
      return;
    }
    const double p = frac * (hi - lo);
    lo -= p;
    hi += p;
  }
};

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void append_text(std::string& svg, double x, double y, const std::string& anchor, int size,
                 const std::string& text, const std::string& extra = "") {
  svg += "<text x=\"" + tick_label(x) + "\" y=\"" + tick_label(y) + "\" font-family=\"sans-serif\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + anchor + "\"" + extra + ">" + xml_escape(text) +
         "</text>\n";
}

/// Frame, tick marks, tick labels, axis labels, and title in screen space.
void append_axes(std::string& svg, const Range& xr, const Range& yr, const std::string& title,
                 const std::string& x_label, const std::string& y_label) {
  const double px1 = kWidth - kRight;
  const double py1 = kHeight - kBottom;
  svg += "<rect x=\"" + tick_label(kLeft) + "\" y=\"" + tick_label(kTop) + "\" width=\"" +
         tick_label(px1 - kLeft) + "\" height=\"" + tick_label(py1 - kTop) +
         "\" fill=\"none\" stroke=\"#333\"/>\n";
  const double sx = (px1 - kLeft) / (xr.hi - xr.lo);
  const double sy = (py1 - kTop) / (yr.hi - yr.lo);
  for (int i = 0; i <= 5; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 5.0;
    const double px = kLeft + (fx - xr.lo) * sx;
    svg += "<line x1=\"" + tick_label(px) + "\" y1=\"" + tick_label(py1) + "\" x2=\"" + tick_label(px) +
           "\" y2=\"" + tick_label(py1 + 5.0) + "\" stroke=\"#333\"/>\n";
    append_text(svg, px, py1 + 18.0, "middle", 11, tick_label(fx));
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 5.0;
    const double py = py1 - (fy - yr.lo) * sy;
    svg += "<line x1=\"" + tick_label(kLeft - 5.0) + "\" y1=\"" + tick_label(py) + "\" x2=\"" +
           tick_label(kLeft) + "\" y2=\"" + tick_label(py) + "\" stroke=\"#333\"/>\n";
    append_text(svg, kLeft - 8.0, py + 4.0, "end", 11, tick_label(fy));
  }
  append_text(svg, (kLeft + px1) / 2.0, 24.0, "middle", 15, title);
  append_text(svg, (kLeft + px1) / 2.0, kHeight - 12.0, "middle", 12, x_label);
  append_text(svg, 16.0, (kTop + py1) / 2.0, "middle", 12, y_label,
              " transform=\"rotate(-90 16 " + tick_label((kTop + py1) / 2.0) + ")\"");
}

/// Opens a group whose transform maps data coordinates onto the plot
/// rectangle (y axis flipped), so children can use raw data values.
std::string open_data_group(const Range& xr, const Range& yr) {
  const double sx = (kWidth - kRight - kLeft) / (xr.hi - xr.lo);
  const double sy = (kHeight - kBottom - kTop) / (yr.hi - yr.lo);
  const double tx = kLeft - xr.lo * sx;
  const double ty = kTop + yr.hi * sy;
  return "<g transform=\"translate(" + tick_label(tx) + " " + tick_label(ty) + ") scale(" + tick_label(sx) +
         " " + tick_label(-sy) + ")\">\n";
}

std::string point_list(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::string pts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) pts += ' ';
    pts += csv::format_double(xs[i]) + "," + csv::format_double(ys[i]);
  }
  return pts;
}

}  // namespace

CurveSeries curve_from_logs(const std::string& label, const std::vector<csv::Table>& logs,
                            const std::string& x_col, const std::string& y_col) {
  require(!logs.empty(), "plot: no logs given for series '" + label + "'");
  const std::size_t rows = logs[0].rows.size();
  require(rows > 0, "plot: log 0 of series '" + label + "' has no rows");
  for (std::size_t k = 0; k < logs.size(); ++k) {
    require(logs[k].column(x_col) >= 0,
            "plot: log " + std::to_string(k) + " of series '" + label + "' lacks column '" + x_col + "'");
    require(logs[k].column(y_col) >= 0,
            "plot: log " + std::to_string(k) + " of series '" + label + "' lacks column '" + y_col + "'");
    require(logs[k].rows.size() == rows, "plot: log " + std::to_string(k) + " of series '" + label +
                                             "' has " + std::to_string(logs[k].rows.size()) +
                                             " rows, log 0 has " + std::to_string(rows));
  }
  CurveSeries out;
  out.label = label;
  out.x.resize(rows);
  out.mean.resize(rows);
  out.ci.resize(rows);
  std::vector<double> sample(logs.size());
  for (std::size_t r = 0; r < rows; ++r) {
    out.x[r] = logs[0].num(r, x_col);
    for (std::size_t k = 0; k < logs.size(); ++k) {
      const double x = logs[k].num(r, x_col);
      require(x == out.x[r], "plot: series '" + label + "' row " + std::to_string(r) + ": log " +
                                 std::to_string(k) + " has x=" + csv::format_double(x) + ", log 0 has x=" +
                                 csv::format_double(out.x[r]));
      sample[k] = logs[k].num(r, y_col);
    }
    out.mean[r] = stats::mean(sample);
    out.ci[r] = logs.size() > 1 ? stats::ci95_halfwidth(sample) : 0.0;
  }
  return out;
}

std::string learning_curve_svg(const std::vector<CurveSeries>& series, const std::string& title,
                               const std::string& x_label, const std::string& y_label) {
  require(!series.empty(), "plot: no series to draw");
  Range xr{series[0].x.empty() ? 0.0 : series[0].x[0], series[0].x.empty() ? 1.0 : series[0].x[0]};
  Range yr{series[0].mean.empty() ? 0.0 : series[0].mean[0],
           series[0].mean.empty() ? 1.0 : series[0].mean[0]};
  for (const CurveSeries& s : series) {
    require(!s.x.empty(), "plot: series '" + s.label + "' is empty");
    require(s.mean.size() == s.x.size() && s.ci.size() == s.x.size(),
            "plot: series '" + s.label + "' has mismatched x/mean/ci lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xr.include(s.x[i]);
      yr.include(s.mean[i] - s.ci[i]);
      yr.include(s.mean[i] + s.ci[i]);
    }
  }
  xr.pad(0.0);
  yr.pad(0.05);

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + tick_label(kWidth) +
                    "\" height=\"" + tick_label(kHeight) + "\" viewBox=\"0 0 " + tick_label(kWidth) + " " +
                    tick_label(kHeight) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  append_axes(svg, xr, yr, title, x_label, y_label);
  svg += open_data_group(xr, yr);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const CurveSeries& s = series[k];
    const char* color = kPalette[k % kPaletteSize];
    bool has_band = false;
    for (double c : s.ci) has_band = has_band || c != 0.0;
    if (has_band) {
      std::vector<double> bx, by;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        bx.push_back(s.x[i]);
        by.push_back(s.mean[i] + s.ci[i]);
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        bx.push_back(s.x[i]);
        by.push_back(s.mean[i] - s.ci[i]);
      }
      svg += "<polygon class=\"band\" fill=\"" + std::string(color) +
             "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"" + point_list(bx, by) + "\"/>\n";
    }
    svg += "<polyline class=\"mean\" data-label=\"" + xml_escape(s.label) + "\" fill=\"none\" stroke=\"" +
           color + "\" stroke-width=\"1.5\" vector-effect=\"non-scaling-stroke\" points=\"" +
           point_list(s.x, s.mean) + "\"/>\n";
  }
  svg += "</g>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double ly = kTop + 14.0 + 16.0 * static_cast<double>(k);
    svg += "<line x1=\"" + tick_label(kWidth - kRight - 150.0) + "\" y1=\"" + tick_label(ly - 4.0) +
           "\" x2=\"" + tick_label(kWidth - kRight - 126.0) + "\" y2=\"" + tick_label(ly - 4.0) +
           "\" stroke=\"" + kPalette[k % kPaletteSize] + "\" stroke-width=\"2\"/>\n";
    append_text(svg, kWidth - kRight - 120.0, ly, "start", 12, series[k].label);
  }
  svg += "</svg>\n";
  return svg;
}

std::string grouped_bar_svg(const std::vector<std::string>& series_labels,
                            const std::vector<BarGroup>& groups, const std::string& title,
                            const std::string& y_label) {
  require(!series_labels.empty(), "plot: no bar series labels");
  require(!groups.empty(), "plot: no bar groups");
  Range yr{0.0, 0.0};
  for (const BarGroup& g : groups) {
    require(g.values.size() == series_labels.size() && g.ci.size() == series_labels.size(),
            "plot: bar group '" + g.label + "' has " + std::to_string(g.values.size()) + " values for " +
                std::to_string(series_labels.size()) + " series");
    for (std::size_t i = 0; i < g.values.size(); ++i) {
      yr.include(g.values[i] - g.ci[i]);
      yr.include(g.values[i] + g.ci[i]);
    }
  }
  yr.pad(0.05);

  const double px1 = kWidth - kRight;
  const double py1 = kHeight - kBottom;
  const double sy = (py1 - kTop) / (yr.hi - yr.lo);
  const auto screen_y = [&](double v) { return py1 - (v - yr.lo) * sy; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + tick_label(kWidth) +
                    "\" height=\"" + tick_label(kHeight) + "\" viewBox=\"0 0 " + tick_label(kWidth) + " " +
                    tick_label(kHeight) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<rect x=\"" + tick_label(kLeft) + "\" y=\"" + tick_label(kTop) + "\" width=\"" +
         tick_label(px1 - kLeft) + "\" height=\"" + tick_label(py1 - kTop) +
         "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 5.0;
    const double py = screen_y(fy);
    svg += "<line x1=\"" + tick_label(kLeft - 5.0) + "\" y1=\"" + tick_label(py) + "\" x2=\"" +
           tick_label(kLeft) + "\" y2=\"" + tick_label(py) + "\" stroke=\"#333\"/>\n";
    append_text(svg, kLeft - 8.0, py + 4.0, "end", 11, tick_label(fy));
  }
  append_text(svg, (kLeft + px1) / 2.0, 24.0, "middle", 15, title);
  append_text(svg, 16.0, (kTop + py1) / 2.0, "middle", 12, y_label,
              " transform=\"rotate(-90 16 " + tick_label((kTop + py1) / 2.0) + ")\"");

  const double group_w = (px1 - kLeft) / static_cast<double>(groups.size());
  const double bar_w = 0.8 * group_w / static_cast<double>(series_labels.size());
  const double base = screen_y(std::clamp(0.0, yr.lo, yr.hi));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = kLeft + group_w * (static_cast<double>(g) + 0.1);
    for (std::size_t k = 0; k < series_labels.size(); ++k) {
      const double x = gx + bar_w * static_cast<double>(k);
      const double v = groups[g].values[k];
      const double c = groups[g].ci[k];
      const double top = screen_y(v);
      svg += "<rect class=\"bar\" data-group=\"" + xml_escape(groups[g].label) + "\" data-series=\"" +
             xml_escape(series_labels[k]) + "\" data-value=\"" + csv::format_double(v) + "\" data-ci=\"" +
             csv::format_double(c) + "\" x=\"" + tick_label(x) + "\" y=\"" + tick_label(std::min(top, base)) +
             "\" width=\"" + tick_label(bar_w) + "\" height=\"" + tick_label(std::abs(base - top)) +
             "\" fill=\"" + kPalette[k % kPaletteSize] + "\"/>\n";
      if (c != 0.0) {
        const double cx = x + bar_w / 2.0;
        svg += "<line x1=\"" + tick_label(cx) + "\" y1=\"" + tick_label(screen_y(v - c)) + "\" x2=\"" +
               tick_label(cx) + "\" y2=\"" + tick_label(screen_y(v + c)) + "\" stroke=\"#333\"/>\n";
        svg += "<line x1=\"" + tick_label(cx - bar_w / 4.0) + "\" y1=\"" + tick_label(screen_y(v + c)) +
               "\" x2=\"" + tick_label(cx + bar_w / 4.0) + "\" y2=\"" + tick_label(screen_y(v + c)) +
               "\" stroke=\"#333\"/>\n";
        svg += "<line x1=\"" + tick_label(cx - bar_w / 4.0) + "\" y1=\"" + tick_label(screen_y(v - c)) +
               "\" x2=\"" + tick_label(cx + bar_w / 4.0) + "\" y2=\"" + tick_label(screen_y(v - c)) +
               "\" stroke=\"#333\"/>\n";
      }
    }
    append_text(svg, gx + 0.4 * group_w, py1 + 18.0, "middle", 11, groups[g].label);
  }
  for (std::size_t k = 0; k < series_labels.size(); ++k) {
    const double ly = kTop + 14.0 + 16.0 * static_cast<double>(k);
    svg += "<rect x=\"" + tick_label(kWidth - kRight - 150.0) + "\" y=\"" + tick_label(ly - 11.0) +
           "\" width=\"12\" height=\"12\" fill=\"" + kPalette[k % kPaletteSize] + "\"/>\n";
    append_text(svg, kWidth - kRight - 132.0, ly, "start", 12, series_labels[k]);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace gaplab
