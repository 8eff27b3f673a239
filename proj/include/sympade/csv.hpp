#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sympade {

// Rectangular numeric table with a header row. Footer lines are emitted
// after the rows as "# ..." comments.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> footer;

  void add_row(std::vector<double> row);
  std::string render() const;
};

// Scientific notation with 17 significant digits; parses back to the same
// double.
std::string format_number(double value);

// Inverse of CsvTable::render. Throws Error(invalid_argument) on a ragged or
// non-numeric body.
CsvTable parse_csv(std::string_view text);

}  // namespace sympade
