#pragma once

// Uniform spatial grids and ε-indexed complex samples on them.

#include <iosfwd>
#include <vector>

#include "gfio/common.hpp"

namespace gfio {

/// Box [lo, hi) per axis with n points per axis, x_j = lo + j (hi - lo) / n. Row-major, last axis fastest.
struct UniformGrid {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::size_t> n;

  static UniformGrid line(double lo, double hi, std::size_t n);
  static UniformGrid square(double lo, double hi, std::size_t n);

  void validate() const;
  std::size_t dim() const { return n.size(); }
  std::size_t size() const;
  double spacing(std::size_t axis) const { return (hi[axis] - lo[axis]) / static_cast<double>(n[axis]); }
  double length(std::size_t axis) const { return hi[axis] - lo[axis]; }
  double coord(std::size_t axis, std::size_t i) const { return lo[axis] + spacing(axis) * static_cast<double>(i); }
  std::vector<double> point(std::size_t flat) const;
  std::vector<std::vector<double>> points() const;
  double cell() const;  // largest spacing
};

bool is_power_of_two(std::size_t n);

struct GridFunction {
  UniformGrid grid;
  double t = 0.0;
  std::vector<double> eps;
  std::vector<std::vector<cplx>> values;  // values[k] sampled at eps[k]

  const std::vector<cplx>& at_eps(double e) const;
};

/// max_x |a - b| for each ε; both functions must share grid and ε list.
std::vector<double> max_abs_diff(const GridFunction& a, const GridFunction& b);

/// Rows: eps, x.., re, im
void write_csv(std::ostream& os, const GridFunction& u);

}  // namespace gfio
