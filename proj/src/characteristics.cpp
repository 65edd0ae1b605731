#include "gfio/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace gfio {

namespace {

std::vector<double> point_of(double s, const double* g, std::size_t n) {
  std::vector<double> p(n + 1);
  p[0] = s;
  std::copy(g, g + n, p.begin() + 1);
  return p;
}

std::vector<double> where(std::span<const double> x, double t, double s) {
  std::vector<double> w(x.begin(), x.end());
  w.push_back(t);
  w.push_back(s);
  return w;
}

}  // namespace

void CoefficientSet::validate() const {
  if (n == 0) throw ArgumentError("coefficients: spatial dimension must be >= 1");
  if (a1.size() != n) throw ArgumentError("coefficients: need one principal coefficient per dimension");
  for (const auto& a : a1)
    if (!a.valid() || a.dimension() != n + 1) throw ArgumentError("coefficients: a1 entries must be families over (t, x)");
  if (a0.valid() && a0.dimension() != n + 1) throw ArgumentError("coefficients: a0 must be a family over (t, x)");
}

bool CoefficientSet::a1_time_only() const {
  return std::all_of(a1.begin(), a1.end(), [](const ParamFamily& a) { return a.is_zero() || a.time_only(); });
}

CharFlow::CharFlow(CoefficientSet c, double tol) : c_(std::move(c)), tol_(tol) {
  c_.validate();
  if (!(tol > 0.0)) throw ArgumentError("solve_characteristics: tolerance must be > 0");
}

OdeOptions CharFlow::options(double eps) const {
  OdeOptions o;
  // per-step tolerance; the accumulated error over a trace stays near tol_
  o.rtol = 1e-2 * tol_;
  o.atol = 1e-2 * tol_;
  if (c_.feature_width) o.h_max = 0.125 * c_.feature_width(eps);
  return o;
}

void CharFlow::rhs_a1(double eps, double s, const double* g, double* dg) const {
  const auto p = point_of(s, g, c_.n);
  for (std::size_t h = 0; h < c_.n; ++h) dg[h] = c_.a1[h].is_zero() ? 0.0 : -c_.a1[h](eps, p).real();
}

CharFlow::State CharFlow::trace(double eps, std::span<const double> x, double t, double s, bool with_jac,
                                bool with_beta) const {
  const std::size_t n = c_.n;
  if (x.size() != n) throw ArgumentError("characteristics: point has wrong dimension");
  const bool jac_states = with_jac && !c_.a1_time_only();
  const bool beta_states = with_beta && !c_.a0_zero();
  const std::size_t nj = jac_states ? n * n : 0;
  const std::size_t nb = beta_states ? 2 : 0;

  std::vector<double> y(n + nj + nb, 0.0);
  std::copy(x.begin(), x.end(), y.begin());
  if (jac_states)
    for (std::size_t i = 0; i < n; ++i) y[n + i * n + i] = 1.0;

  auto f = [&](double sig, const std::vector<double>& yv, std::vector<double>& dy) {
    rhs_a1(eps, sig, yv.data(), dy.data());
    const auto p = point_of(sig, yv.data(), n);
    if (jac_states) {
      // dJ/dσ = -(∂a1/∂x)(σ, γ) J, J stored row-major
      std::vector<int> alpha(n + 1, 0);
      Eigen::MatrixXd A(n, n);
      for (std::size_t h = 0; h < n; ++h)
        for (std::size_t k = 0; k < n; ++k) {
          if (c_.a1[h].is_zero() || c_.a1[h].time_only()) {
            A(h, k) = 0.0;
            continue;
          }
          alpha.assign(n + 1, 0);
          alpha[1 + k] = 1;
          A(h, k) = c_.a1[h].derivative(eps, p, alpha).real();
        }
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> J(yv.data() + n, n, n);
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> dJ(dy.data() + n, n, n);
      dJ = -A * J;
    }
    if (beta_states) {
      const cplx a = c_.a0(eps, p);
      dy[n + nj] = -a.real();
      dy[n + nj + 1] = -a.imag();
    }
  };

  try {
    integrate_dopri(f, t, s, y, options(eps));
  } catch (const StepUnderflow& u) {
    auto w = where(x, t, s);
    w.push_back(u.s);
    throw SolverError("characteristic ODE step size underflow", eps, w);
  }

  State st;
  st.gamma.assign(y.begin(), y.begin() + n);
  if (jac_states) {
    st.jac.resize(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) st.jac(i, k) = y[n + i * n + k];
  } else {
    st.jac = Eigen::MatrixXd::Identity(n, n);
  }
  if (beta_states) st.beta = cplx(y[n + nj], y[n + nj + 1]);
  for (double v : st.gamma)
    if (!std::isfinite(v)) throw SolverError("characteristic left the finite range", eps, where(x, t, s));
  return st;
}

std::vector<double> CharFlow::gamma(double eps, std::span<const double> x, double t, double s) const {
  return trace(eps, x, t, s, false, false).gamma;
}

Eigen::MatrixXd CharFlow::jac(double eps, std::span<const double> x, double t, double s) const {
  return trace(eps, x, t, s, true, false).jac;
}

cplx CharFlow::beta(double eps, std::span<const double> x, double t) const {
  if (c_.a0_zero()) return 0.0;
  return trace(eps, x, t, 0.0, false, true).beta;
}

std::vector<std::vector<double>> CharFlow::gamma_batch(double eps, const std::vector<std::vector<double>>& xs,
                                                       double t, double s) const {
  std::vector<std::vector<double>> out;
  out.reserve(xs.size());
  if (c_.a1_time_only()) {
    const std::vector<double> origin(c_.n, 0.0);
    const auto shift = gamma(eps, origin, t, s);
    for (const auto& x : xs) {
      std::vector<double> g(x);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += shift[i];
      out.push_back(std::move(g));
    }
  } else {
    for (const auto& x : xs) out.push_back(gamma(eps, x, t, s));
  }
  return out;
}

CharFlow::DuhamelState CharFlow::trace_duhamel(double eps, std::span<const double> x, double t,
                                               const ParamFamily& f) const {
  const std::size_t n = c_.n;
  if (x.size() != n) throw ArgumentError("characteristics: point has wrong dimension");
  if (f.dimension() != n + 1) throw ArgumentError("nonhomogeneous term must be a family over (t, x)");
  // state: γ, B = ∫_σ^t a0 (re, im), J (re, im)
  std::vector<double> y(n + 4, 0.0);
  std::copy(x.begin(), x.end(), y.begin());
  double min_im_b = 0.0;
  auto rhs = [&](double sig, const std::vector<double>& yv, std::vector<double>& dy) {
    rhs_a1(eps, sig, yv.data(), dy.data());
    const auto p = point_of(sig, yv.data(), n);
    const cplx a = c_.a0_zero() ? cplx(0.0) : c_.a0(eps, p);
    dy[n] = -a.real();
    dy[n + 1] = -a.imag();
    const cplx B(yv[n], yv[n + 1]);
    min_im_b = std::min(min_im_b, B.imag());
    const cplx g = f.is_zero() ? cplx(0.0) : -f(eps, p) * std::exp(kI * B);
    dy[n + 2] = g.real();
    dy[n + 3] = g.imag();
  };
  try {
    integrate_dopri(rhs, t, 0.0, y, options(eps));
  } catch (const StepUnderflow& u) {
    auto w = where(x, t, 0.0);
    w.push_back(u.s);
    throw SolverError("Duhamel ODE step size underflow", eps, w);
  }
  DuhamelState st;
  st.foot.assign(y.begin(), y.begin() + n);
  st.beta = cplx(y[n], y[n + 1]);
  st.forcing = cplx(y[n + 2], y[n + 3]);
  // |b(τ, γ)| = exp(-Im β + Im B(τ))
  st.min_abs_b = std::exp(-st.beta.imag() + std::min(min_im_b, st.beta.imag()));
  return st;
}

cplx PhaseAmp::amplitude(double eps, double t, std::span<const double> x) const {
  if (!beta) return 1.0;
  return std::exp(kI * beta(eps, t, x));
}

PhaseAmp eikonal_phase(std::shared_ptr<const CharFlow> flow) {
  if (!flow) throw ArgumentError("eikonal_phase: missing flow");
  PhaseAmp p;
  p.n = flow->dimension();
  p.flow = flow;
  p.eta_gradient = [flow](double eps, double t, std::span<const double> x) { return flow->gamma(eps, x, t, 0.0); };
  p.phase = [flow](double eps, double t, std::span<const double> x, std::span<const double> eta) {
    const auto g = flow->gamma(eps, x, t, 0.0);
    double v = 0.0;
    for (std::size_t h = 0; h < g.size(); ++h) v += g[h] * eta[h];
    return v;
  };
  return p;
}

PhaseAmp transport_amplitude(std::shared_ptr<const CharFlow> flow) {
  PhaseAmp p = eikonal_phase(flow);
  if (!flow->coefficients().a0_zero())
    p.beta = [flow](double eps, double t, std::span<const double> x) { return flow->beta(eps, x, t); };
  return p;
}

PhaseAmp plane_shift_phase(std::vector<double> c) {
  PhaseAmp p;
  p.n = c.size();
  p.eta_gradient = [c](double, double t, std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= c[i] * t;
    return y;
  };
  p.phase = [c](double, double t, std::span<const double> x, std::span<const double> eta) {
    double v = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) v += (x[i] - c[i] * t) * eta[i];
    return v;
  };
  return p;
}

std::vector<double> eikonal_residual(const PhaseAmp& p, const CoefficientSet& c,
                                     const std::vector<std::vector<double>>& points, const std::vector<double>& eps,
                                     const ResidualOptions& opt) {
  const std::size_t n = c.n;
  std::vector<std::vector<double>> etas;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    etas.push_back(e);
  }
  if (n > 1) etas.push_back(std::vector<double>(n, 1.0 / std::sqrt(static_cast<double>(n))));

  std::vector<double> out;
  for (double e : eps) {
    double worst = 0.0;
    for (const auto& pt : points) {
      if (pt.size() != n + 1) throw ArgumentError("eikonal_residual: points are (t, x)");
      const double t = pt[0];
      std::vector<double> x(pt.begin() + 1, pt.end());
      for (const auto& eta : etas) {
        auto phi_t = [&](double tt) { return p.phase(e, tt, x, eta); };
        auto d_t = [&](double h) { return (phi_t(t + h) - phi_t(t - h)) / (2 * h); };
        const double dt = (4.0 * d_t(0.5 * opt.h_t) - d_t(opt.h_t)) / 3.0;
        double rhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (c.a1[j].is_zero()) continue;
          auto d_x = [&](double h) {
            std::vector<double> xp(x), xm(x);
            xp[j] += h;
            xm[j] -= h;
            return (p.phase(e, t, xp, eta) - p.phase(e, t, xm, eta)) / (2 * h);
          };
          const double dj = (4.0 * d_x(0.5 * opt.h_x) - d_x(opt.h_x)) / 3.0;
          rhs += c.a1[j](e, pt).real() * dj;
        }
        worst = std::max(worst, std::abs(dt - rhs));
      }
    }
    out.push_back(worst);
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const CharFlow& flow, const std::vector<double>& eps,
                          const std::vector<std::vector<double>>& xs, double t, const std::vector<double>& s_values) {
  const std::size_t n = flow.dimension();
  os << "eps";
  for (std::size_t i = 0; i < n; ++i) os << ",x" << i + 1;
  os << ",t,s";
  for (std::size_t i = 0; i < n; ++i) os << ",gamma" << i + 1;
  os << ",detjac\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (double e : eps)
    for (const auto& x : xs)
      for (double s : s_values) {
        const auto st = flow.trace(e, x, t, s, true, false);
        os << num(e);
        for (double v : x) os << ',' << num(v);
        os << ',' << num(t) << ',' << num(s);
        for (double v : st.gamma) os << ',' << num(v);
        os << ',' << num(st.jac.determinant()) << '\n';
      }
}

}  // namespace gfio
