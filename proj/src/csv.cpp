#include "mmd/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <vector>

namespace mmd {

Matrix read_numeric_csv(const std::string& path, bool skip_header) {
  std::ifstream input(path);
  if (!input) {
    throw CsvError("cannot open '" + path + "'", 0);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_number = 0;
  Index columns = -1;
  while (std::getline(input, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line_number == 1 && skip_header) {
      continue;
    }
    if (line.empty()) {
      continue;
    }
    std::vector<double> row;
    std::size_t begin = 0;
    while (begin <= line.size()) {
      std::size_t end = line.find(',', begin);
      if (end == std::string::npos) end = line.size();
      // trim surrounding spaces
      std::size_t first = begin;
      std::size_t last = end;
      while (first < last && (line[first] == ' ' || line[first] == '\t')) ++first;
      while (last > first && (line[last - 1] == ' ' || line[last - 1] == '\t')) --last;
      double value = 0.0;
      const auto status = std::from_chars(line.data() + first, line.data() + last, value);
      if (status.ec != std::errc{} || status.ptr != line.data() + last) {
        throw CsvError("non-numeric cell '" + line.substr(first, last - first) + "'",
                       line_number);
      }
      row.push_back(value);
      begin = end + 1;
      if (end == line.size()) break;
    }
    if (columns < 0) {
      columns = static_cast<Index>(row.size());
    } else if (static_cast<Index>(row.size()) != columns) {
      throw CsvError("ragged row: expected " + std::to_string(columns) + " cells, found " +
                         std::to_string(row.size()),
                     line_number);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw CsvError("no data rows in '" + path + "'", line_number);
  }
  Matrix values(static_cast<Index>(rows.size()), columns);
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < columns; ++j) {
      values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return values;
}

void write_numeric_csv(const std::string& path, const MatrixRef& values) {
  std::ofstream output(path);
  if (!output) {
    throw CsvError("cannot open '" + path + "' for writing", 0);
  }
  char buffer[64];
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", values(i, j));
      output << buffer;
      if (j + 1 < values.cols()) output << ',';
    }
    output << '\n';
  }
}

}  // namespace mmd
