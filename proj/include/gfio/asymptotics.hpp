#pragma once

// Classification of sampled ε-nets against moderate / negligible / slow-scale / log-type growth.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gfio {

/// Seminorm samples p(u_ε) on a descending ε-grid.
struct NetSamples {
  std::vector<double> grid;
  std::vector<double> values;

  void validate() const;
  static NetSamples sample(const std::vector<double>& grid, const std::function<double(double)>& net);
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  double residual = 0.0;  // RMS residual
};

/// Ordinary least squares y ≈ intercept + slope·x. Zero-variance data give r2 = 1.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct ExponentFit {
  bool negligible_signal = false;  // every value below 1e-300
  double slope = 0.0;              // log(value) against log(1/ε), whole grid
  double slope_stderr = 0.0;
  double tail_slope = 0.0;         // same fit on the smaller-ε half
  double intercept = 0.0;
  double r2 = 1.0;
  double residual = 0.0;
  double curvature = 0.0;          // quadratic coefficient of a second-order fit
  bool curved = false;
};

ExponentFit growth_exponent(const NetSamples& s);

enum class GrowthKind { Negligible, LogType, SlowScale, Moderate, Indeterminate };
std::string to_string(GrowthKind kind);

struct GrowthClass {
  GrowthKind kind = GrowthKind::Indeterminate;
  int moderate_exponent = 0;  // ceil(max(slope - slope_tol, 0)), reported for every kind
  double slope = 0.0;
  double fit_quality = 0.0;   // R² of the fit backing the reported kind
  double residual = 0.0;
  bool negligible = false;
  bool log_type = false;
  bool slow_scale = false;
  std::optional<double> strictly_nonzero;

  std::string describe() const;
};

inline constexpr double kSlopeTolerance = 0.1;
inline constexpr double kBoundFactor = 10.0;

/// Bounded on the tail half: tail log-log slope ≤ 0.1 and late values ≤ 10× the tail median.
bool bounded_on_tail(const std::vector<double>& grid, const std::vector<double>& values);

GrowthClass classify_net(const NetSamples& s, int qmax = 8);

/// Smallest r ≥ 0 with value ≥ ε^r on the tail half, or none (zeros on the tail, or r > 50).
std::optional<double> is_strictly_nonzero(const NetSamples& s);

/// Rows: eps, value, fitted value.
void write_csv(std::ostream& os, const NetSamples& s, const ExponentFit& fit);

}  // namespace gfio
