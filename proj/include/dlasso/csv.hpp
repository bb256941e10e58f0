#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dlasso/types.hpp"

namespace dlasso {

/// Parsed numeric table. Header is present only when the first row of the
/// file contains at least one non-numeric cell.
struct CsvTable {
  std::vector<std::string> header;  // empty if the file had none
  Matrix values;

  bool has_header() const { return !header.empty(); }
};

/// Reads a comma-separated numeric table (LF or CRLF endings, '.' decimal,
/// UTF-8). All rows must have equal arity; a non-numeric cell outside the
/// header raises ParseError with the offending row/column.
CsvTable read_csv(const std::string& path);

/// Formats a double with 17 significant digits ("%.17g").
std::string format_double(double x);

/// Design + response as loaded by the CLI.
struct Dataset {
  Matrix X;
  Vector Y;
  std::vector<std::string> names;  // covariate names, x1..xp if no header
};

/// X from x_path; Y either from y_path (single-column CSV) or from the named
/// column of the X file (remaining columns become the design).
Dataset load_dataset(const std::string& x_path,
                     const std::optional<std::string>& y_path,
                     const std::optional<std::string>& y_col);

/// Subtracts column means from X and the mean from Y (no-intercept model).
void center_dataset(Dataset& data);

std::string matrix_to_csv(const Matrix& m);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace dlasso
