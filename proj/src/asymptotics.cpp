#include "gfio/asymptotics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "gfio/common.hpp"

namespace gfio {

namespace {

constexpr double kTiny = 1e-300;

double safe_log(double v) { return std::log(std::max(v, kTiny)); }

std::vector<double> log_inverse(const std::vector<double>& grid) {
  std::vector<double> L(grid.size());
  std::transform(grid.begin(), grid.end(), L.begin(), [](double e) { return std::log(1.0 / e); });
  return L;
}

std::size_t tail_start(std::size_t n) { return n / 2; }

template <class T>
std::vector<T> tail_of(const std::vector<T>& v) {
  return std::vector<T>(v.begin() + static_cast<std::ptrdiff_t>(tail_start(v.size())), v.end());
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Both tests in log space so that huge ratios ε^{-q}·v do not overflow.
bool bounded_tail(const std::vector<double>& Lt, const std::vector<double>& yt) {
  if (fit_line(Lt, yt).slope > kSlopeTolerance) return false;
  const double med = median(yt);
  const std::size_t late = yt.size() / 2;
  for (std::size_t i = late; i < yt.size(); ++i)
    if (yt[i] > med + std::log(kBoundFactor)) return false;
  return true;
}

bool bounded_log(const std::vector<double>& L, const std::vector<double>& logv) {
  return bounded_tail(tail_of(L), tail_of(logv));
}

// Underflowed samples satisfy every power bound, so only the others are tested.
bool bounded_log_nonzero(const std::vector<double>& L, const std::vector<double>& logv,
                         const std::vector<double>& values) {
  const auto Lt = tail_of(L), yt = tail_of(logv), vt = tail_of(values);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < vt.size(); ++i)
    if (vt[i] > kTiny) {
      x.push_back(Lt[i]);
      y.push_back(yt[i]);
    }
  return x.size() < 3 || bounded_tail(x, y);
}

struct QuadFit {
  double c0, c1, c2, r2;
};

QuadFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = x[i];
    A(i, 2) = x[i] * x[i];
    b(i) = y[i];
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  const double ss_res = (A * c - b).squaredNorm();
  const double r2 = ss_tot <= 1e-28 * std::max(1.0, mean * mean) * static_cast<double>(n) ? 1.0 : 1.0 - ss_res / ss_tot;
  return {c(0), c(1), c(2), r2};
}

}  // namespace

void NetSamples::validate() const {
  if (grid.empty() || values.empty()) throw ArgumentError("net samples: empty");
  if (grid.size() != values.size()) throw ArgumentError("net samples: grid/values length mismatch");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] <= 1.0)) throw ArgumentError("net samples: eps outside (0, 1]");
    if (i > 0 && !(grid[i] < grid[i - 1])) throw ArgumentError("net samples: grid must be strictly decreasing");
    if (!std::isfinite(values[i]) || values[i] < 0.0)
      throw ArgumentError("net samples: values must be finite and nonnegative");
  }
}

NetSamples NetSamples::sample(const std::vector<double>& grid, const std::function<double(double)>& net) {
  NetSamples s;
  s.grid = grid;
  for (double e : grid) s.values.push_back(net(e));
  return s;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw ArgumentError("fit_line: need at least two paired points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ArgumentError("fit_line: abscissae are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.residual = std::sqrt(ss_res / n);
  f.r2 = syy <= 1e-28 * std::max(1.0, my * my) * n ? 1.0 : 1.0 - ss_res / syy;
  return f;
}

ExponentFit growth_exponent(const NetSamples& s) {
  s.validate();
  if (s.grid.size() < 6) throw ArgumentError("growth_exponent: need at least 6 grid points");
  ExponentFit out;
  if (std::all_of(s.values.begin(), s.values.end(), [](double v) { return v < kTiny; })) {
    out.negligible_signal = true;
    return out;
  }
  const auto L = log_inverse(s.grid);
  std::vector<double> y(s.values.size());
  std::transform(s.values.begin(), s.values.end(), y.begin(), safe_log);
  const LinearFit f = fit_line(L, y);
  out.slope = f.slope;
  out.intercept = f.intercept;
  out.r2 = f.r2;
  out.residual = f.residual;
  double sxx = 0, mx = 0;
  for (double l : L) mx += l;
  mx /= L.size();
  for (double l : L) sxx += (l - mx) * (l - mx);
  const double dof = static_cast<double>(L.size()) - 2.0;
  out.slope_stderr = std::sqrt(f.residual * f.residual * L.size() / dof / sxx);
  out.tail_slope = fit_line(tail_of(L), tail_of(y)).slope;
  const QuadFit q = fit_quadratic(L, y);
  out.curvature = q.c2;
  const double span = L.back() - L.front();
  out.curved = std::abs(q.c2) * span * span > 0.05;
  return out;
}

std::string to_string(GrowthKind kind) {
  switch (kind) {
    case GrowthKind::Negligible: return "Negligible";
    case GrowthKind::LogType: return "LogType";
    case GrowthKind::SlowScale: return "SlowScale";
    case GrowthKind::Moderate: return "Moderate";
    case GrowthKind::Indeterminate: return "Indeterminate";
  }
  return "?";
}

std::string GrowthClass::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind == GrowthKind::Moderate) os << '(' << moderate_exponent << ')';
  return os.str();
}

bool bounded_on_tail(const std::vector<double>& grid, const std::vector<double>& values) {
  std::vector<double> y(values.size());
  std::transform(values.begin(), values.end(), y.begin(), safe_log);
  return bounded_log(log_inverse(grid), y);
}

GrowthClass classify_net(const NetSamples& s, int qmax) {
  s.validate();
  if (qmax < 0) throw ArgumentError("classify_net: qmax must be >= 0");
  const ExponentFit fit = growth_exponent(s);
  GrowthClass c;
  c.strictly_nonzero = is_strictly_nonzero(s);
  if (fit.negligible_signal) {
    c.kind = GrowthKind::Negligible;
    c.negligible = c.log_type = c.slow_scale = true;
    c.slope = -std::numeric_limits<double>::infinity();
    c.fit_quality = 1.0;
    return c;
  }
  c.slope = fit.slope;
  c.moderate_exponent = static_cast<int>(std::ceil(std::max(fit.slope - kSlopeTolerance, 0.0)));

  const auto L = log_inverse(s.grid);
  std::vector<double> logv(s.values.size());
  std::transform(s.values.begin(), s.values.end(), logv.begin(), safe_log);
  std::vector<double> logL(L.size());
  std::transform(L.begin(), L.end(), logL.begin(), [](double l) { return std::log(l); });

  auto shifted = [&](auto&& g) {
    std::vector<double> y(logv.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = g(i);
    return y;
  };

  c.negligible = true;
  for (int q = 0; q <= qmax && c.negligible; ++q)
    c.negligible = bounded_log_nonzero(L, shifted([&](std::size_t i) { return logv[i] + q * L[i]; }), s.values);
  c.log_type = bounded_log(L, shifted([&](std::size_t i) { return logv[i] - logL[i]; }));
  c.slow_scale = true;
  for (int q = 1; q <= std::max(qmax, 1) && c.slow_scale; ++q)
    c.slow_scale = bounded_log(L, shifted([&](std::size_t i) { return q * logv[i] - L[i]; }));

  if (c.negligible) {
    c.kind = GrowthKind::Negligible;
    // values that underflowed carry no shape information
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < L.size(); ++i)
      if (s.values[i] > kTiny) {
        xs.push_back(L[i]);
        ys.push_back(logv[i]);
      }
    c.fit_quality = xs.size() >= 4 ? fit_quadratic(xs, ys).r2 : 1.0;
    c.residual = fit.residual;
  } else if (c.log_type) {
    c.kind = GrowthKind::LogType;
    const LinearFit f = fit_line(L, s.values);
    c.fit_quality = f.r2;
    c.residual = f.residual;
  } else if (c.slow_scale) {
    c.kind = GrowthKind::SlowScale;
    const LinearFit f = fit_line(logL, logv);
    c.fit_quality = f.r2;
    c.residual = f.residual;
  } else {
    c.kind = GrowthKind::Moderate;
    c.fit_quality = fit.r2;
    c.residual = fit.residual;
  }
  if (c.fit_quality < 0.9) c.kind = GrowthKind::Indeterminate;
  return c;
}

std::optional<double> is_strictly_nonzero(const NetSamples& s) {
  s.validate();
  const auto g = tail_of(s.grid);
  const auto v = tail_of(s.values);
  double r = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(v[i] >= kTiny)) return std::nullopt;
    r = std::max(r, std::log(v[i]) / std::log(g[i]));
  }
  if (r > 50.0) return std::nullopt;
  return r;
}

void write_csv(std::ostream& os, const NetSamples& s, const ExponentFit& fit) {
  char buf[128];
  os << "eps,value,fitted\n";
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const double fitted = fit.negligible_signal ? 0.0 : std::exp(fit.intercept + fit.slope * std::log(1.0 / s.grid[i]));
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.grid[i], s.values[i], fitted);
    os << buf;
  }
}

}  // namespace gfio
