#include "sympade/csv.hpp"

#include <charconv>
#include <sstream>

#include "sympade/error.hpp"

namespace sympade {

void CsvTable::add_row(std::vector<double> row) {
  if (!header.empty() && row.size() != header.size()) {
    throw Error(ErrorCode::dimension_mismatch, "row has " + std::to_string(row.size()) +
                                                   " columns, header has " +
                                                   std::to_string(header.size()));
  }
  rows.push_back(std::move(row));
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

std::string CsvTable::render() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  for (const auto& line : footer) {
    out += "# ";
    out += line;
    out += '\n';
  }
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      table.footer.push_back(line.size() > 2 ? line.substr(2) : std::string());
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream fields(line);
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size()) {
        throw Error(ErrorCode::invalid_argument, "non-numeric CSV cell '" + c + "'");
      }
      row.push_back(v);
    }
    if (row.size() != table.header.size()) throw Error(ErrorCode::invalid_argument, "ragged CSV row");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace sympade
