#pragma once

#include <string>
#include <vector>

namespace gaplab::csv {

/// Minimal RFC-4180-style CSV table: UTF-8, LF line endings, no quoting
/// (gaplab emits only numbers and plain identifiers).
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 if absent
  double num(std::size_t row, const std::string& col) const;
};

std::string format_double(double v);

void write_file(const std::string& path, const Table& table);
Table read_file(const std::string& path);

}  // namespace gaplab::csv
