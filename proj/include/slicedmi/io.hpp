#pragma once

// Text I/O: headerless delimited numeric tables (one sample per row, comma
// or whitespace separated) and small formatting helpers for CSV emission.

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "slicedmi/errors.hpp"
#include "slicedmi/sampling.hpp"

namespace slicedmi {

// Shortest text that round-trips the double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline SampleMatrix load_matrix(std::istream& is, const std::string& name = "<stream>") {
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  long width = -1;
  while (std::getline(is, line)) {
    ++line_no;
    for (char& c : line)
      if (c == ',' || c == '\t' || c == '\r') c = ' ';
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (!ss.eof()) throw parse_error(name + ": non-numeric field", line_no);
    if (row.empty()) continue;  // blank lines are tolerated
    if (width < 0)
      width = static_cast<long>(row.size());
    else if (static_cast<long>(row.size()) != width)
      throw parse_error(name + ": expected " + std::to_string(width) + " columns, got " +
                            std::to_string(row.size()),
                        line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error(name + ": no data rows", line_no);
  SampleMatrix m(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (long j = 0; j < width; ++j) m(static_cast<Eigen::Index>(i), j) = rows[i][j];
  if (!m.allFinite()) throw parse_error(name + ": non-finite value in table", line_no);
  return m;
}

inline SampleMatrix load_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw input_error("cannot open input file: " + path);
  return load_matrix(f, path);
}

inline void save_matrix(std::ostream& os, const SampleMatrix& m, char delim = ' ') {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << delim;
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

inline void save_matrix_file(const std::string& path, const SampleMatrix& m, char delim = ' ') {
  std::ofstream f(path);
  if (!f) throw input_error("cannot open output file: " + path);
  save_matrix(f, m, delim);
  if (!f.good()) throw input_error("write failed: " + path);
}

}  // namespace slicedmi
