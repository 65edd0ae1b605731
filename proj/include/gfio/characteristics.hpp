#pragma once

// Characteristic flow, eikonal phase and transport amplitude for
//   D_t u = Σ_j a_{1,j}(t,x) D_j u + a_0(t,x) u,   D = -i∂.

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "gfio/common.hpp"
#include "gfio/ode.hpp"
#include "gfio/regularization.hpp"

namespace gfio {

/// Coefficients as families over (t, x_1..x_n).
struct CoefficientSet {
  std::size_t n = 1;
  std::vector<ParamFamily> a1;  // real principal coefficients
  ParamFamily a0;               // complex lower-order coefficient; invalid means zero
  Box domain_box;               // bounds in (t, x)
  /// Smallest coefficient length scale at ε (caps the ODE step); unset means no cap.
  std::function<double(double)> feature_width;

  void validate() const;
  bool a1_time_only() const;
  bool a0_zero() const { return !a0.valid() || a0.is_zero(); }
  bool a0_time_only() const { return a0_zero() || a0.time_only(); }
};

/// γ(x,t,s) solving dγ/ds = -a1(s, γ), γ(x,t,t) = x, with the variational Jacobian ∂γ/∂x.
class CharFlow {
 public:
  explicit CharFlow(CoefficientSet c, double tol = 1e-9);

  struct State {
    std::vector<double> gamma;
    Eigen::MatrixXd jac;
    cplx beta = 0.0;  // ∫_s^t a0(σ, γ(x,t,σ)) dσ
  };

  /// Joint integration of trajectory, Jacobian and (optionally) the a0 integral from σ = t to σ = s.
  State trace(double eps, std::span<const double> x, double t, double s, bool with_jac = true,
              bool with_beta = false) const;

  std::vector<double> gamma(double eps, std::span<const double> x, double t, double s) const;
  Eigen::MatrixXd jac(double eps, std::span<const double> x, double t, double s) const;
  /// β(t,x) = ∫_0^t a0(s, γ(x,t,s)) ds
  cplx beta(double eps, std::span<const double> x, double t) const;

  /// γ(x,t,s) for many x; one trajectory is translated when a1 does not depend on x.
  std::vector<std::vector<double>> gamma_batch(double eps, const std::vector<std::vector<double>>& xs, double t,
                                               double s) const;

  struct DuhamelState {
    std::vector<double> foot;  // γ(x,t,0)
    cplx beta = 0.0;           // β(t,x)
    cplx forcing = 0.0;        // ∫_0^t f(τ,γ(x,t,τ)) e^{i∫_τ^t a0} dτ
    double min_abs_b = 1.0;    // smallest |b| met along the flow
  };
  /// Backward sweep accumulating the Duhamel integral of f along the characteristic through (t, x).
  DuhamelState trace_duhamel(double eps, std::span<const double> x, double t, const ParamFamily& f) const;

  const CoefficientSet& coefficients() const { return c_; }
  double tolerance() const { return tol_; }
  std::size_t dimension() const { return c_.n; }

 private:
  OdeOptions options(double eps) const;
  void rhs_a1(double eps, double s, const double* g, double* dg) const;

  CoefficientSet c_;
  double tol_;
};

/// Builds the flow object; trajectories are integrated on demand per (ε, x, t, s).
inline std::shared_ptr<const CharFlow> solve_characteristics(CoefficientSet c, double tol = 1e-9) {
  return std::make_shared<const CharFlow>(std::move(c), tol);
}

/// Generalized phase φ_ε(t,x,η) together with the amplitude b_ε = e^{iβ_ε}.
struct PhaseAmp {
  std::size_t n = 1;
  std::function<double(double eps, double t, std::span<const double> x, std::span<const double> eta)> phase;
  /// ∇_η φ when φ is linear in η (φ = y·η); unset otherwise.
  std::function<std::vector<double>(double eps, double t, std::span<const double> x)> eta_gradient;
  /// β_ε(t,x); unset means b ≡ 1.
  std::function<cplx(double eps, double t, std::span<const double> x)> beta;
  std::shared_ptr<const CharFlow> flow;

  cplx amplitude(double eps, double t, std::span<const double> x) const;
};

/// φ(t,x,η) = Σ_h γ_h(x,t,0) η_h
PhaseAmp eikonal_phase(std::shared_ptr<const CharFlow> flow);

/// Adds β = ∫_0^t a0(s, γ(x,t,s)) ds (integrated as extra ODE states) to the eikonal phase.
PhaseAmp transport_amplitude(std::shared_ptr<const CharFlow> flow);

/// φ = (x - c t)·η, b = 1.
PhaseAmp plane_shift_phase(std::vector<double> c);

struct ResidualOptions {
  double h_t = 1e-3;
  double h_x = 1e-3;
};

/// max over points (t, x) and unit η of |∂_tφ - Σ_j a_{1,j} ∂_jφ|, one value per ε.
/// Derivatives are Richardson-extrapolated central differences.
std::vector<double> eikonal_residual(const PhaseAmp& p, const CoefficientSet& c,
                                     const std::vector<std::vector<double>>& points, const std::vector<double>& eps,
                                     const ResidualOptions& opt = {});

/// Rows: eps, x.., t, s, gamma.., detjac
void write_trajectory_csv(std::ostream& os, const CharFlow& flow, const std::vector<double>& eps,
                          const std::vector<std::vector<double>>& xs, double t, const std::vector<double>& s_values);

}  // namespace gfio
