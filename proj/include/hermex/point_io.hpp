#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hermex/fastsum.hpp"

namespace hermex {

/// Points parsed from CSV: one point per row; when weighted, the weight sits
/// in the last column.
struct PointSet {
  PointList points;
  std::vector<double> weights;
};

inline PointSet read_points_csv(const std::string& path, bool with_weights) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_points_csv: cannot open " + path);
  PointSet set;
  std::string line;
  std::size_t expected_cols = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("read_points_csv: bad number at " + path + ":" +
                                 std::to_string(lineno));
      }
    }
    if (row.empty()) continue;
    if (expected_cols == 0) {
      expected_cols = row.size();
      if (with_weights && expected_cols < 2)
        throw std::runtime_error("read_points_csv: weighted rows need >= 2 columns");
    } else if (row.size() != expected_cols) {
      throw std::runtime_error("read_points_csv: ragged row at " + path + ":" +
                               std::to_string(lineno));
    }
    if (with_weights) {
      set.weights.push_back(row.back());
      row.pop_back();
    }
    set.points.push_back(std::move(row));
  }
  return set;
}

inline void write_points_csv(const std::string& path, const PointList& points,
                             const std::vector<double>* weights = nullptr) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_points_csv: cannot open " + path);
  char buf[64];
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < points[i].size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", points[i][j]);
      if (j) out << ',';
      out << buf;
    }
    if (weights) {
      std::snprintf(buf, sizeof buf, "%.17g", (*weights)[i]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace hermex
