#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace vmsgf {

/// Decimal with 17 significant digits.
std::string format_double(double v);

/// Comma-separated output with '#'-prefixed header lines followed by one
/// column-name row.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header_lines,
            const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& cells);
  void close();

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t width_;
};

struct CsvTable {
  std::vector<std::string> header_lines;  // without the leading '#'
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);

}  // namespace vmsgf
