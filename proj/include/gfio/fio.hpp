#pragma once

// Evaluation of the solution operator F_φ(b): characteristic form, oscillatory-integral form and
// the Duhamel form for a right-hand side f.

#include <vector>

#include "gfio/characteristics.hpp"
#include "gfio/grid.hpp"
#include "gfio/regularization.hpp"

namespace gfio {

/// values(ε, x) = b_ε(t,x) u0_ε(γ_ε(x,t,0))
GridFunction apply_fio_characteristic(const PhaseAmp& p, const CharFlow& flow, const ParamFamily& u0, double t,
                                      const UniformGrid& grid, const std::vector<double>& eps);

struct OscillatoryOptions {
  double tail_tolerance = 1e-12;  // relative l1 mass of the DFT allowed in |k| ≥ 3N/8
  double edge_tolerance = 1e-12;  // relative size of u0 allowed on the box boundary
};

/// DFT of the u0 samples on the frequency grid η_k = 2πk/L, k = -N/2..N/2-1, then
///   u(t,x) = (1/L) Σ_k e^{iφ(t,x,η_k)} b(t,x) û0(η_k).
/// One spatial dimension. Throws ResolutionError when the sampled spectrum is not resolved.
GridFunction apply_fio_oscillatory(const PhaseAmp& p, const ParamFamily& u0, double t, const UniformGrid& grid,
                                   const std::vector<double>& eps, const OscillatoryOptions& opt = {});

/// Samples of the DFT û(η_k) = dx Σ_j u(x_j) e^{-iη_k x_j}, ordered k = -N/2..N/2-1.
std::vector<cplx> sampled_spectrum(const std::vector<cplx>& samples, const UniformGrid& grid);

/// Relative l1 mass of a centered spectrum in |k| ≥ 3N/8.
double spectral_tail_mass(const std::vector<cplx>& spectrum);

/// u(t,x) = b(t,x) (u0(y) + i ∫_0^t f(τ, γ(x,t,τ)) / b(τ, γ(x,t,τ)) dτ), y = γ(x,t,0).
/// With f ≡ 0 this returns apply_fio_characteristic unchanged.
GridFunction solve_nonhomogeneous(const PhaseAmp& p, const CharFlow& flow, const ParamFamily& u0,
                                  const ParamFamily& f, double t, const UniformGrid& grid,
                                  const std::vector<double>& eps);

}  // namespace gfio
