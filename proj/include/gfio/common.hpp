#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfio {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition or malformed input.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed at a specific regularization parameter and location.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double eps, std::vector<double> where)
      : Error(what), eps_(eps), where_(std::move(where)) {}
  double eps() const { return eps_; }
  const std::vector<double>& where() const { return where_; }

 private:
  double eps_;
  std::vector<double> where_;
};

/// Sampled data do not resolve the spectrum; carries the grid size that would.
class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& what, std::size_t required_points)
      : Error(what), required_(required_points) {}
  std::size_t required_points() const { return required_; }

 private:
  std::size_t required_;
};

/// Geometric ε-grid ε_k = 2^{-k}, k = k_min..k_max, in descending order.
inline std::vector<double> eps_grid(int k_min = 2, int k_max = 16) {
  if (k_min < 0 || k_max < k_min) throw ArgumentError("eps_grid: need 0 <= k_min <= k_max");
  std::vector<double> g;
  for (int k = k_min; k <= k_max; ++k) g.push_back(std::ldexp(1.0, -k));
  return g;
}

/// ⟨ξ⟩ = (1 + |ξ|²)^{1/2}
inline double japanese(double xi) { return std::sqrt(1.0 + xi * xi); }

}  // namespace gfio
