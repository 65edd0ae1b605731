#pragma once

// Symbols in one space dimension for the t-dependent pseudodifferential case: explicit phase,
// symbol-valued transport solutions and the truncated parametrix hierarchy.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gfio/common.hpp"
#include "gfio/jet.hpp"

namespace gfio {

/// ε-family of symbols a(t, x, η) of declared order m.
struct SymbolFamily {
  std::function<cplx(double eps, double t, double x, double eta)> eval;
  /// ∂_x^{kx} ∂_η^{keta}; unset means Richardson central differences (total order ≤ 2).
  std::function<cplx(double eps, double t, double x, double eta, int kx, int keta)> deriv;
  /// Taylor jet in x at (t, x, η); unset means assembled from deriv.
  std::function<Jet(double eps, double t, double x, double eta, int order)> x_jet;
  double order = 0.0;
  std::string label;
  bool x_independent = false;
  bool zero = false;

  cplx operator()(double eps, double t, double x, double eta) const { return eval(eps, t, x, eta); }
  cplx derivative(double eps, double t, double x, double eta, int kx, int keta) const;
  Jet jet(double eps, double t, double x, double eta, int order) const;
  int max_derivative_order() const { return deriv ? 64 : 2; }

  static SymbolFamily constant(cplx value);
  /// c(t)·η
  static SymbolFamily linear(std::function<double(double)> c);
  /// c(t)·⟨η⟩
  static SymbolFamily japanese(std::function<double(double)> c);
  /// g(x)·⟨η⟩^{iκ}; dg(x, k) returns g^{(k)}(x).
  static SymbolFamily japanese_power(std::function<double(double, int)> dg, double kappa, bool x_independent = false);
  /// g(x), independent of t and η.
  static SymbolFamily of_x(std::function<double(double, int)> dg);
};

/// k-th derivative of ⟨η⟩^p at η.
cplx japanese_power_derivative(double eta, cplx p, int k);

/// g^{(k)}(x) for g(x) = amplitude·exp(-x²/width²).
double gaussian_derivative(double x, double amplitude, double width, int k);

/// φ_ε(t,x,η) = xη + ∫_0^t a1_ε(s,η) ds by adaptive Gauss–Kronrod quadrature.
SymbolFamily pseudo_phase(const SymbolFamily& a1, double tol = 1e-12);

/// max |∂_tφ - a1(t,η)| over (t, η) samples, central differences with step h.
double pseudo_eikonal_residual(const SymbolFamily& phase, const SymbolFamily& a1, double eps,
                               const std::vector<double>& times, const std::vector<double>& etas, double h = 1e-4);

/// Solution of D_t s = ∂_η a1 D_x s + a0 s + f, s(0) = s0, by the characteristic formula
///   s = b (s0(γ(t,x,η), η) + i ∫_0^t f(τ, γ(t,x,η,τ), η) / b(τ, γ(t,x,η,τ), η) dτ)
/// with fixed-node Gauss–Legendre quadrature.
SymbolFamily pseudo_transport_solve(const SymbolFamily& a1, const SymbolFamily& a0, const SymbolFamily& f,
                                    const SymbolFamily& s0, int nodes = 24);

/// Terms b_0, b_{-1}, ..., b_{-K} of the symbol hierarchy. Each term carries an exact x-jet.
std::vector<SymbolFamily> build_parametrix(const SymbolFamily& a1, const SymbolFamily& a0, int K, int nodes = 24);

struct ResidualFit {
  std::vector<double> magnitudes;
  std::vector<double> residuals;  // max over test points of |R_K| on the ray η = M·direction
  double slope = 0.0;
  double r2 = 0.0;
};

/// R_K = D_t B - Σ_{α≥1} ∂_η^α a1 (-i)^α ∂_x^α B/α! - Σ_{α≥0} ∂_η^α a0 (-i)^α ∂_x^α B/α!, B = Σ bs,
/// with α ≤ K + 3 and D_t by Richardson differences. One fit of log|R_K| against log M per ε.
std::vector<ResidualFit> parametrix_residual(const std::vector<SymbolFamily>& bs, const SymbolFamily& a1,
                                             const SymbolFamily& a0, const std::vector<std::pair<double, double>>& points,
                                             double eta_direction, const std::vector<double>& magnitudes,
                                             const std::vector<double>& eps, double dt = 1e-3);

}  // namespace gfio
