#ifndef MMD_CSV_HPP
#define MMD_CSV_HPP

#include <stdexcept>
#include <string>

#include "mmd/kernels.hpp"

namespace mmd {

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& message, long line)
      : std::runtime_error(line > 0 ? message + " (line " + std::to_string(line) + ")"
                                    : message),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Numeric CSV: comma separator, '.' decimal point, no quoting. Rows are
/// observations. Ragged rows and non-numeric cells raise CsvError with the
/// offending 1-based line number.
Matrix read_numeric_csv(const std::string& path, bool skip_header);

/// Writes with round-trip precision; read_numeric_csv recovers the exact
/// values.
void write_numeric_csv(const std::string& path, const MatrixRef& values);

}  // namespace mmd

#endif
