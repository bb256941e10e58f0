#include "dlasso/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dlasso/errors.hpp"

namespace dlasso {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  cells.push_back(cell);
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  if (begin == end) return false;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path);
  out << content;
  if (!out) throw ParseError("write failed: " + path);
}

CsvTable read_csv(const std::string& path) {
  const std::string content = read_text_file(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::istringstream in(content);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_line(line));
  }
  if (rows.empty()) throw ParseError("empty CSV: " + path);

  const size_t arity = rows[0].size();
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != arity) {
      throw ParseError(path + ": row " + std::to_string(r + 1) + " has " +
                       std::to_string(rows[r].size()) + " cells, expected " +
                       std::to_string(arity));
    }
  }

  // Header detection: any non-numeric cell in the first row.
  bool header = false;
  for (const std::string& cell : rows[0]) {
    double ignored;
    if (!parse_double(cell, ignored)) {
      header = true;
      break;
    }
  }

  CsvTable table;
  size_t first_data = 0;
  if (header) {
    table.header = rows[0];
    first_data = 1;
    if (rows.size() == 1) throw ParseError(path + ": header but no data rows");
  }
  const size_t n = rows.size() - first_data;
  table.values.resize(static_cast<Eigen::Index>(n),
                      static_cast<Eigen::Index>(arity));
  for (size_t r = 0; r < n; ++r) {
    for (size_t c = 0; c < arity; ++c) {
      double v;
      if (!parse_double(rows[r + first_data][c], v)) {
        throw ParseError(path + ": non-numeric cell at row " +
                         std::to_string(r + first_data + 1) + ", column " +
                         std::to_string(c + 1));
      }
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          v;
    }
  }
  return table;
}

Dataset load_dataset(const std::string& x_path,
                     const std::optional<std::string>& y_path,
                     const std::optional<std::string>& y_col) {
  if (y_path.has_value() == y_col.has_value()) {
    throw ArgumentError("load_dataset: provide exactly one of --y / --y-col");
  }
  const CsvTable x_table = read_csv(x_path);

  Dataset data;
  if (y_col) {
    if (!x_table.has_header()) {
      throw ParseError("--y-col requires a header row in " + x_path);
    }
    int col = -1;
    for (size_t j = 0; j < x_table.header.size(); ++j) {
      if (x_table.header[j] == *y_col) {
        col = static_cast<int>(j);
        break;
      }
    }
    if (col < 0) {
      throw ParseError("column '" + *y_col + "' not found in " + x_path);
    }
    data.Y = x_table.values.col(col);
    data.X.resize(x_table.values.rows(), x_table.values.cols() - 1);
    int out = 0;
    for (int j = 0; j < x_table.values.cols(); ++j) {
      if (j == col) continue;
      data.X.col(out) = x_table.values.col(j);
      data.names.push_back(x_table.header[j]);
      ++out;
    }
  } else {
    data.X = x_table.values;
    if (x_table.has_header()) {
      data.names = x_table.header;
    } else {
      for (int j = 0; j < data.X.cols(); ++j) {
        data.names.push_back("x" + std::to_string(j + 1));
      }
    }
    const CsvTable y_table = read_csv(*y_path);
    if (y_table.values.cols() != 1) {
      throw DimensionError("response CSV must have exactly one column: " +
                           *y_path);
    }
    data.Y = y_table.values.col(0);
  }

  if (data.Y.size() != data.X.rows()) {
    throw DimensionError("X and Y disagree on the number of rows");
  }
  return data;
}

void center_dataset(Dataset& data) {
  const double y_mean = data.Y.mean();
  data.Y.array() -= y_mean;
  for (int j = 0; j < data.X.cols(); ++j) {
    data.X.col(j).array() -= data.X.col(j).mean();
  }
}

std::string matrix_to_csv(const Matrix& m) {
  std::string out;
  out.reserve(static_cast<size_t>(m.size()) * 20);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace dlasso
