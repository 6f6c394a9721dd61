#include "gaplab/common/csv.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gaplab/common/error.hpp"

namespace gaplab::csv {

int Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

double Table::num(std::size_t row, const std::string& col) const {
  const int c = column(col);
  require(c >= 0, "csv: no column named '" + col + "'");
  require(row < rows.size(), "csv: row out of range");
  const std::string& s = rows[row][static_cast<std::size_t>(c)];
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(end && *end == '\0', "csv: cell is not a number: " + s);
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_file(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "csv: cannot open for write: " + path);
  auto emit_row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  emit_row(table.header);
  for (const auto& row : table.rows) {
    require(row.size() == table.header.size(), "csv: ragged row in " + path);
    emit_row(row);
  }
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "csv: cannot open for read: " + path);
  Table t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (lineno == 1) {
      t.header = cells;
    } else {
      require(cells.size() == t.header.size(),
              "csv: row " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                  " cells, header has " + std::to_string(t.header.size()) + " in " + path);
      t.rows.push_back(cells);
    }
  }
  require(!t.header.empty(), "csv: empty file: " + path);
  return t;
}

}  // namespace gaplab::csv
