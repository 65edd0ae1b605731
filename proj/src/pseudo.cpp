#include "gfio/pseudo.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <utility>

#include "gfio/asymptotics.hpp"

namespace gfio {

namespace {

using Rule = std::vector<std::pair<double, double>>;  // nodes and weights on [-1, 1]

template <unsigned N>
Rule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  Rule r;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      r.emplace_back(0.0, w[i]);
    } else {
      r.emplace_back(-x[i], w[i]);
      r.emplace_back(x[i], w[i]);
    }
  }
  return r;
}

const Rule& rule(int nodes) {
  static const Rule r8 = make_rule<8>(), r16 = make_rule<16>(), r24 = make_rule<24>(), r32 = make_rule<32>();
  switch (nodes) {
    case 8: return r8;
    case 16: return r16;
    case 24: return r24;
    case 32: return r32;
    default: throw ArgumentError("Gauss-Legendre rule: nodes must be 8, 16, 24 or 32");
  }
}

template <class F>
auto gl_integrate(const Rule& r, double a, double b, F&& f) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  auto acc = f(mid + half * r[0].first) * (half * r[0].second);
  for (std::size_t i = 1; i < r.size(); ++i) acc += f(mid + half * r[i].first) * (half * r[i].second);
  return acc;
}

cplx minus_i_pow(int a) {
  static const cplx table[4] = {cplx(1, 0), cplx(0, -1), cplx(-1, 0), cplx(0, 1)};
  return table[a % 4];
}

Jet eta_derivative_jet(const SymbolFamily& s, double eps, double t, double x, double eta, int m, int order) {
  if (m == 0) return s.jet(eps, t, x, eta, order);
  Jet j(order);
  double fact = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) fact *= k;
    j[k] = (s.x_independent && k > 0) ? cplx(0.0) : s.derivative(eps, t, x, eta, k, m) / fact;
  }
  return j;
}

// x-independent shift G(s) = ∫_0^s ∂_η a1(σ, η) dσ
double drift(const SymbolFamily& a1, const Rule& r, double eps, double s, double eta) {
  if (s == 0.0 || a1.zero) return 0.0;
  return gl_integrate(r, 0.0, s, [&](double sig) { return a1.derivative(eps, sig, 0.0, eta, 0, 1).real(); });
}

class Hierarchy {
 public:
  Hierarchy(SymbolFamily a1, SymbolFamily a0, int nodes) : a1_(std::move(a1)), a0_(std::move(a0)), r_(rule(nodes)) {}

  // Taylor jet in x of b_{-k}(t, ·, η) at x
  Jet jet(int k, double eps, double t, double x, double eta, int order) const {
    const double Gt = drift(a1_, r_, eps, t, eta);
    auto gam = [&](double s) { return x + Gt - drift(a1_, r_, eps, s, eta); };
    auto A = [&](double tau) {
      if (tau == 0.0 || a0_.zero) return Jet(order);
      return gl_integrate(r_, 0.0, tau, [&](double s) { return a0_.jet(eps, s, gam(s), eta, order); });
    };
    const Jet bt = exp(kI * A(t));
    if (k == 0) return bt;
    if (t == 0.0) return Jet(order);
    const Jet integral = gl_integrate(r_, 0.0, t, [&](double tau) {
      const double y = gam(tau);
      return forcing(k, eps, tau, y, eta, order) * exp(-kI * A(tau));
    });
    return bt * (kI * integral);
  }

  // f_{-k} at (τ, y) as a jet in x
  Jet forcing(int k, double eps, double tau, double y, double eta, int order) const {
    Jet f(order);
    for (int j = 0; j < k; ++j) {
      const int a = k - j + 1;
      const int m = k - j;
      const Jet bj = jet(j, eps, tau, y, eta, order + a);
      if (!a1_.zero) f += (a1_.derivative(eps, tau, y, eta, 0, a) * minus_i_pow(a)) * bj.shifted(a, order);
      if (!a0_.zero) f += minus_i_pow(m) * (eta_derivative_jet(a0_, eps, tau, y, eta, m, order) * bj.shifted(m, order));
    }
    return f;
  }

 private:
  SymbolFamily a1_, a0_;
  const Rule& r_;
};

cplx fd_symbol(const SymbolFamily& s, double eps, double t, double x, double eta, int kx, int keta) {
  if (kx + keta > 2) throw ArgumentError("symbol '" + s.label + "': no analytic derivative beyond order 2");
  auto d1 = [&](auto&& g, double h) { return (g(h) - g(-h)) / (2 * h); };
  auto rich = [&](auto&& g, double h) { return (4.0 * d1(g, 0.5 * h) - d1(g, h)) / 3.0; };
  const double hx = 1e-3, he = 1e-5 * japanese(eta);
  if (kx == 0 && keta == 0) return s.eval(eps, t, x, eta);
  if (kx == 1 && keta == 0) return rich([&](double h) { return s.eval(eps, t, x + h, eta); }, hx);
  if (kx == 0 && keta == 1) return rich([&](double h) { return s.eval(eps, t, x, eta + h); }, he);
  if (kx == 1 && keta == 1)
    return rich([&](double h) { return fd_symbol(s, eps, t, x + h, eta, 0, 1); }, hx);
  if (kx == 2) return rich([&](double h) { return fd_symbol(s, eps, t, x + h, eta, 1, 0); }, hx);
  return rich([&](double h) { return fd_symbol(s, eps, t, x, eta + h, 0, 1); }, 1e-3 * japanese(eta));
}

}  // namespace

cplx SymbolFamily::derivative(double eps, double t, double x, double eta, int kx, int keta) const {
  if (zero) return 0.0;
  if (kx == 0 && keta == 0) return eval(eps, t, x, eta);
  if (x_independent && kx > 0) return 0.0;
  if (deriv) return deriv(eps, t, x, eta, kx, keta);
  return fd_symbol(*this, eps, t, x, eta, kx, keta);
}

Jet SymbolFamily::jet(double eps, double t, double x, double eta, int order) const {
  if (zero) return Jet(order);
  if (x_jet) return x_jet(eps, t, x, eta, order);
  Jet j(order, eval(eps, t, x, eta));
  if (x_independent) return j;
  double fact = 1.0;
  for (int k = 1; k <= order; ++k) {
    fact *= k;
    j[k] = derivative(eps, t, x, eta, k, 0) / fact;
  }
  return j;
}

cplx japanese_power_derivative(double eta, cplx p, int k) {
  Jet f(std::max(k, 2));
  f[0] = 1.0 + eta * eta;
  f[1] = 2.0 * eta;
  f[2] = 1.0;
  return pow(f, 0.5 * p).derivative(k);
}

double gaussian_derivative(double x, double amplitude, double width, int k) {
  // d^k/dx^k exp(-u²) = (-1)^k H_k(u) exp(-u²), u = x / width
  const double u = x / width;
  double h0 = 1.0, h1 = 2.0 * u;
  double hk = k == 0 ? h0 : h1;
  for (int n = 1; n < k; ++n) {
    hk = 2.0 * u * h1 - 2.0 * n * h0;
    h0 = h1;
    h1 = hk;
  }
  return amplitude * ((k % 2) ? -1.0 : 1.0) * hk * std::exp(-u * u) / std::pow(width, k);
}

SymbolFamily SymbolFamily::constant(cplx value) {
  SymbolFamily s;
  s.eval = [value](double, double, double, double) { return value; };
  s.deriv = [](double, double, double, double, int, int) { return cplx(0.0); };
  s.order = 0.0;
  s.label = "constant";
  s.x_independent = true;
  s.zero = value == cplx(0.0);
  return s;
}

SymbolFamily SymbolFamily::linear(std::function<double(double)> c) {
  SymbolFamily s;
  s.eval = [c](double, double t, double, double eta) { return cplx(c(t) * eta); };
  s.deriv = [c](double, double t, double, double eta, int kx, int keta) {
    if (kx > 0 || keta > 1) return cplx(0.0);
    return keta == 1 ? cplx(c(t)) : cplx(c(t) * eta);
  };
  s.order = 1.0;
  s.label = "linear";
  s.x_independent = true;
  return s;
}

SymbolFamily SymbolFamily::japanese(std::function<double(double)> c) {
  SymbolFamily s;
  s.eval = [c](double, double t, double, double eta) { return cplx(c(t) * gfio::japanese(eta)); };
  s.deriv = [c](double, double t, double, double eta, int kx, int keta) {
    if (kx > 0) return cplx(0.0);
    if (keta == 1) return cplx(c(t) * eta / gfio::japanese(eta));
    return c(t) * japanese_power_derivative(eta, 1.0, keta);
  };
  s.order = 1.0;
  s.label = "japanese";
  s.x_independent = true;
  return s;
}

SymbolFamily SymbolFamily::japanese_power(std::function<double(double, int)> dg, double kappa, bool x_independent) {
  SymbolFamily s;
  const cplx p(0.0, kappa);
  s.eval = [dg, p](double, double, double x, double eta) {
    return dg(x, 0) * std::pow(cplx(1.0 + eta * eta), 0.5 * p);
  };
  s.deriv = [dg, p](double, double, double x, double eta, int kx, int keta) {
    return dg(x, kx) * japanese_power_derivative(eta, p, keta);
  };
  s.x_jet = [dg, p, x_independent](double, double, double x, double eta, int order) {
    const cplx h = std::pow(cplx(1.0 + eta * eta), 0.5 * p);
    Jet j(order);
    double fact = 1.0;
    for (int k = 0; k <= order; ++k) {
      if (k > 0) fact *= k;
      j[k] = (x_independent && k > 0) ? cplx(0.0) : dg(x, k) * h / fact;
    }
    return j;
  };
  s.order = 0.0;
  s.label = "japanese-power";
  s.x_independent = x_independent;
  return s;
}

SymbolFamily SymbolFamily::of_x(std::function<double(double, int)> dg) {
  SymbolFamily s;
  s.eval = [dg](double, double, double x, double) { return cplx(dg(x, 0)); };
  s.deriv = [dg](double, double, double x, double, int kx, int keta) {
    return keta > 0 ? cplx(0.0) : cplx(dg(x, kx));
  };
  s.order = 0.0;
  s.label = "of-x";
  return s;
}

SymbolFamily pseudo_phase(const SymbolFamily& a1, double tol) {
  if (!a1.x_independent) throw ArgumentError("pseudo_phase: a1 must not depend on x");
  SymbolFamily phi;
  phi.eval = [a1, tol](double eps, double t, double x, double eta) {
    if (t == 0.0) return cplx(x * eta);
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double s) { return a1(eps, s, 0.0, eta).real(); }, 0.0, t, 15, tol);
    return cplx(x * eta + integral);
  };
  phi.order = 1.0;
  phi.label = "phase";
  return phi;
}

double pseudo_eikonal_residual(const SymbolFamily& phase, const SymbolFamily& a1, double eps,
                               const std::vector<double>& times, const std::vector<double>& etas, double h) {
  double worst = 0.0;
  for (double t : times)
    for (double eta : etas) {
      auto d = [&](double hh) { return (phase(eps, t + hh, 0.0, eta) - phase(eps, t - hh, 0.0, eta)) / (2 * hh); };
      const cplx dt = (4.0 * d(0.5 * h) - d(h)) / 3.0;
      worst = std::max(worst, std::abs(dt - a1(eps, t, 0.0, eta)));
    }
  return worst;
}

SymbolFamily pseudo_transport_solve(const SymbolFamily& a1, const SymbolFamily& a0, const SymbolFamily& f,
                                    const SymbolFamily& s0, int nodes) {
  if (!a1.x_independent) throw ArgumentError("pseudo_transport_solve: a1 must not depend on x");
  const Rule& r = rule(nodes);
  SymbolFamily s;
  s.order = std::max(f.zero ? s0.order : f.order, s0.order);
  s.label = "transport";
  s.eval = [a1, a0, f, s0, &r](double eps, double t, double x, double eta) {
    const double Gt = drift(a1, r, eps, t, eta);
    auto gam = [&](double tau) { return x + Gt - drift(a1, r, eps, tau, eta); };
    auto A = [&](double tau) {
      if (tau == 0.0 || a0.zero) return cplx(0.0);
      return gl_integrate(r, 0.0, tau, [&](double sg) { return a0(eps, sg, gam(sg), eta); });
    };
    cplx inner = s0.zero ? cplx(0.0) : s0(eps, 0.0, x + Gt, eta);
    if (!f.zero && t != 0.0)
      inner += kI * gl_integrate(r, 0.0, t, [&](double tau) { return f(eps, tau, gam(tau), eta) * std::exp(-kI * A(tau)); });
    return std::exp(kI * A(t)) * inner;
  };
  return s;
}

std::vector<SymbolFamily> build_parametrix(const SymbolFamily& a1, const SymbolFamily& a0, int K, int nodes) {
  if (K < 0) throw ArgumentError("build_parametrix: K must be >= 0");
  if (!a1.x_independent) throw ArgumentError("build_parametrix: a1 must not depend on x");
  if (K + 1 > a1.max_derivative_order() || K > a0.max_derivative_order())
    throw ArgumentError("build_parametrix: K exceeds the available symbol derivative order");
  auto h = std::make_shared<const Hierarchy>(a1, a0, nodes);
  std::vector<SymbolFamily> out;
  for (int k = 0; k <= K; ++k) {
    SymbolFamily b;
    b.order = -k;
    b.label = "b_-" + std::to_string(k);
    b.x_jet = [h, k](double eps, double t, double x, double eta, int order) { return h->jet(k, eps, t, x, eta, order); };
    b.eval = [h, k](double eps, double t, double x, double eta) { return h->jet(k, eps, t, x, eta, 0)[0]; };
    b.deriv = [h, k](double eps, double t, double x, double eta, int kx, int keta) -> cplx {
      auto dx = [&](double e) { return h->jet(k, eps, t, x, e, kx).derivative(kx); };
      if (keta == 0) return dx(eta);
      if (keta > 1) throw ArgumentError("parametrix terms: eta derivatives beyond order 1 are not provided");
      const double he = 1e-4 * japanese(eta);
      auto d = [&](double hh) { return (dx(eta + hh) - dx(eta - hh)) / (2 * hh); };
      return (4.0 * d(0.5 * he) - d(he)) / 3.0;
    };
    b.x_independent = a0.x_independent || a0.zero;
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<ResidualFit> parametrix_residual(const std::vector<SymbolFamily>& bs, const SymbolFamily& a1,
                                             const SymbolFamily& a0, const std::vector<std::pair<double, double>>& points,
                                             double eta_direction, const std::vector<double>& magnitudes,
                                             const std::vector<double>& eps, double dt) {
  if (bs.empty()) throw ArgumentError("parametrix_residual: empty hierarchy");
  if (magnitudes.size() < 4) throw ArgumentError("parametrix_residual: need at least 4 magnitudes for the fit");
  if (eta_direction == 0.0) throw ArgumentError("parametrix_residual: direction must be nonzero");
  const double dir = eta_direction > 0 ? 1.0 : -1.0;
  const int K = static_cast<int>(bs.size()) - 1;
  const int amax = K + 3;
  std::vector<ResidualFit> out;
  for (double e : eps) {
    ResidualFit fit;
    fit.magnitudes = magnitudes;
    for (double M : magnitudes) {
      const double eta = dir * M;
      double worst = 0.0;
      for (const auto& [t, x] : points) {
        Jet B(amax);
        for (const auto& b : bs) B += b.jet(e, t, x, eta, amax);
        auto value = [&](double tt) {
          cplx v = 0.0;
          for (const auto& b : bs) v += b(e, tt, x, eta);
          return v;
        };
        auto d = [&](double hh) { return (value(t + hh) - value(t - hh)) / (2 * hh); };
        const cplx DtB = -kI * ((4.0 * d(0.5 * dt) - d(dt)) / 3.0);
        cplx rhs = 0.0;
        for (int a = 0; a <= amax; ++a) {
          if (a >= 1 && !a1.zero) rhs += a1.derivative(e, t, x, eta, 0, a) * minus_i_pow(a) * B[a];
          if (!a0.zero) rhs += a0.derivative(e, t, x, eta, 0, a) * minus_i_pow(a) * B[a];
        }
        worst = std::max(worst, std::abs(DtB - rhs));
      }
      fit.residuals.push_back(worst);
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < magnitudes.size(); ++i) {
      lx.push_back(std::log(magnitudes[i]));
      ly.push_back(std::log(std::max(fit.residuals[i], 1e-300)));
    }
    const LinearFit lf = fit_line(lx, ly);
    fit.slope = lf.slope;
    fit.r2 = lf.r2;
    out.push_back(std::move(fit));
  }
  return out;
}

}  // namespace gfio
