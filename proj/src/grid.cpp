#include "gfio/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace gfio {

UniformGrid UniformGrid::line(double lo, double hi, std::size_t n) {
  UniformGrid g{{lo}, {hi}, {n}};
  g.validate();
  return g;
}

UniformGrid UniformGrid::square(double lo, double hi, std::size_t n) {
  UniformGrid g{{lo, lo}, {hi, hi}, {n, n}};
  g.validate();
  return g;
}

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

void UniformGrid::validate() const {
  if (n.empty() || lo.size() != n.size() || hi.size() != n.size()) throw ArgumentError("grid: inconsistent axes");
  for (std::size_t a = 0; a < n.size(); ++a) {
    if (!(hi[a] > lo[a])) throw ArgumentError("grid: need hi > lo on every axis");
    if (!is_power_of_two(n[a]) || n[a] < 2) throw ArgumentError("grid: sizes must be powers of two");
  }
}

std::size_t UniformGrid::size() const {
  std::size_t s = 1;
  for (auto k : n) s *= k;
  return s;
}

std::vector<double> UniformGrid::point(std::size_t flat) const {
  std::vector<double> p(n.size());
  for (std::size_t a = n.size(); a-- > 0;) {
    p[a] = coord(a, flat % n[a]);
    flat /= n[a];
  }
  return p;
}

std::vector<std::vector<double>> UniformGrid::points() const {
  std::vector<std::vector<double>> ps(size());
  for (std::size_t i = 0; i < ps.size(); ++i) ps[i] = point(i);
  return ps;
}

double UniformGrid::cell() const {
  double c = 0.0;
  for (std::size_t a = 0; a < n.size(); ++a) c = std::max(c, spacing(a));
  return c;
}

const std::vector<cplx>& GridFunction::at_eps(double e) const {
  for (std::size_t k = 0; k < eps.size(); ++k)
    if (eps[k] == e) return values[k];
  throw ArgumentError("grid function: no samples at the requested eps");
}

std::vector<double> max_abs_diff(const GridFunction& a, const GridFunction& b) {
  if (a.eps != b.eps || a.grid.size() != b.grid.size()) throw ArgumentError("max_abs_diff: incompatible functions");
  std::vector<double> out;
  for (std::size_t k = 0; k < a.eps.size(); ++k) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values[k].size(); ++i) m = std::max(m, std::abs(a.values[k][i] - b.values[k][i]));
    out.push_back(m);
  }
  return out;
}

void write_csv(std::ostream& os, const GridFunction& u) {
  os << "eps";
  for (std::size_t a = 0; a < u.grid.dim(); ++a) os << ",x" << a + 1;
  os << ",re,im\n";
  char buf[64];
  for (std::size_t k = 0; k < u.eps.size(); ++k)
    for (std::size_t i = 0; i < u.values[k].size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", u.eps[k]);
      os << buf;
      for (double c : u.grid.point(i)) {
        std::snprintf(buf, sizeof buf, ",%.17g", c);
        os << buf;
      }
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", u.values[k][i].real(), u.values[k][i].imag());
      os << buf;
    }
}

}  // namespace gfio
