#include "vmsgf/csv.hpp"

#include <cstdio>
#include <sstream>

#include "vmsgf/error.hpp"

namespace vmsgf {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header_lines,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary), width_(columns.size()) {
  if (!out_) throw ConfigError("cannot write " + path);
  for (const std::string& line : header_lines) out_ << "# " << line << '\n';
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw Error("row width mismatch writing " + path_);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0) out_ << ',';
    out_ << cells[k];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& cells) {
  std::vector<std::string> text;
  text.reserve(cells.size());
  for (double v : cells) text.push_back(format_double(v));
  row(text);
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw Error("failed writing " + path_);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  CsvTable table;
  std::string line;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      table.header_lines.push_back(line.size() > 1 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!have_columns) {
      table.columns = std::move(cells);
      have_columns = true;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

}  // namespace vmsgf
