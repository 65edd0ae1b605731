#include "gfio/fio.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fftw_lock.hpp"

namespace gfio {

namespace {

std::vector<std::vector<double>> feet_of(const PhaseAmp& p, const CharFlow* flow, double eps, double t,
                                         const std::vector<std::vector<double>>& pts) {
  if (flow) return flow->gamma_batch(eps, pts, t, 0.0);
  if (p.flow) return p.flow->gamma_batch(eps, pts, t, 0.0);
  std::vector<std::vector<double>> out;
  out.reserve(pts.size());
  for (const auto& x : pts) out.push_back(p.eta_gradient(eps, t, x));
  return out;
}

std::vector<cplx> amplitudes_of(const PhaseAmp& p, double eps, double t, const std::vector<std::vector<double>>& pts) {
  std::vector<cplx> b(pts.size(), cplx(1.0));
  if (!p.beta) return b;
  if (p.flow && p.flow->coefficients().a0_time_only()) {
    std::fill(b.begin(), b.end(), p.amplitude(eps, t, pts.front()));
    return b;
  }
  for (std::size_t i = 0; i < pts.size(); ++i) b[i] = p.amplitude(eps, t, pts[i]);
  return b;
}

void check_domain(const ParamFamily& u0, const std::vector<double>& y, double eps) {
  if (u0.domain().empty() || u0.domain().contains(y)) return;
  std::ostringstream os;
  os << "characteristic foot (";
  for (std::size_t i = 0; i < y.size(); ++i) os << (i ? ", " : "") << y[i];
  os << ") leaves the domain of the initial data at eps=" << eps;
  throw ArgumentError(os.str());
}

}  // namespace

GridFunction apply_fio_characteristic(const PhaseAmp& p, const CharFlow& flow, const ParamFamily& u0, double t,
                                      const UniformGrid& grid, const std::vector<double>& eps) {
  grid.validate();
  if (u0.dimension() != grid.dim() || flow.dimension() != grid.dim())
    throw ArgumentError("apply_fio_characteristic: dimension mismatch");
  GridFunction out{grid, t, eps, {}};
  const auto pts = grid.points();
  for (double e : eps) {
    const auto feet = feet_of(p, &flow, e, t, pts);
    const auto b = amplitudes_of(p, e, t, pts);
    std::vector<cplx> v(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      check_domain(u0, feet[i], e);
      v[i] = b[i] * u0(e, feet[i]);
    }
    out.values.push_back(std::move(v));
  }
  return out;
}

std::vector<cplx> sampled_spectrum(const std::vector<cplx>& samples, const UniformGrid& grid) {
  if (grid.dim() != 1) throw ArgumentError("sampled_spectrum: one spatial dimension only");
  const std::size_t N = grid.n[0];
  if (samples.size() != N) throw ArgumentError("sampled_spectrum: sample count does not match grid");
  const double dx = grid.spacing(0);
  const double L = grid.length(0);
  std::vector<cplx> in(samples), fft(N);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(N), reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(fft.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<cplx> spec(N);
  const long half = static_cast<long>(N / 2);
  for (long k = -half; k < half; ++k) {
    const std::size_t idx = static_cast<std::size_t>((k + static_cast<long>(N)) % static_cast<long>(N));
    const double eta = 2.0 * kPi * static_cast<double>(k) / L;
    spec[static_cast<std::size_t>(k + half)] = dx * std::exp(-kI * (eta * grid.lo[0])) * fft[idx];
  }
  return spec;
}

double spectral_tail_mass(const std::vector<cplx>& spectrum) {
  const long N = static_cast<long>(spectrum.size());
  const long half = N / 2;
  double total = 0.0, tail = 0.0;
  for (long i = 0; i < N; ++i) {
    const double m = std::abs(spectrum[static_cast<std::size_t>(i)]);
    total += m;
    if (std::abs(i - half) >= 3 * N / 8) tail += m;
  }
  return total > 0.0 ? tail / total : 0.0;
}

namespace {

std::size_t required_points(const std::vector<cplx>& spectrum, double tol) {
  const long N = static_cast<long>(spectrum.size());
  const long half = N / 2;
  double total = 0.0, inner = 0.0, outer = 0.0;
  for (long i = 0; i < N; ++i) {
    const double m = std::abs(spectrum[static_cast<std::size_t>(i)]);
    const long k = std::abs(i - half);
    total += m;
    if (k >= N / 4 && k < 3 * N / 8) inner += m;
    if (k >= 3 * N / 8) outer += m;
  }
  // Geometric decay per band of width N/8, extrapolated until the tail falls below tol.
  const double q = inner > 0.0 ? outer / inner : 1.0;
  std::size_t req = static_cast<std::size_t>(2 * N);
  if (q > 0.0 && q < 1.0) {
    double bands = std::log(tol * total / std::max(outer, 1e-300)) / std::log(q);
    bands = std::max(bands, 1.0);
    const double target = static_cast<double>(N) * (1.0 + bands / 3.0);
    while (static_cast<double>(req) < target && req < (std::size_t{1} << 30)) req *= 2;
  }
  return req;
}

}  // namespace

GridFunction apply_fio_oscillatory(const PhaseAmp& p, const ParamFamily& u0, double t, const UniformGrid& grid,
                                   const std::vector<double>& eps, const OscillatoryOptions& opt) {
  grid.validate();
  if (grid.dim() != 1 || u0.dimension() != 1) throw ArgumentError("apply_fio_oscillatory: one spatial dimension only");
  if (!p.phase && !p.eta_gradient) throw ArgumentError("apply_fio_oscillatory: phase is missing");
  const std::size_t N = grid.n[0];
  const double L = grid.length(0);
  const double deta = 2.0 * kPi / L;
  const long half = static_cast<long>(N / 2);
  const auto pts = grid.points();

  GridFunction out{grid, t, eps, {}};
  for (double e : eps) {
    std::vector<cplx> samples(N);
    double peak = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      samples[j] = u0(e, pts[j]);
      peak = std::max(peak, std::abs(samples[j]));
    }
    const double edge = std::max(std::abs(samples.front()), std::abs(u0(e, grid.hi[0])));
    if (edge > opt.edge_tolerance * std::max(peak, 1e-300)) {
      std::ostringstream os;
      os << "initial data are not supported inside the grid box at eps=" << e;
      throw ArgumentError(os.str());
    }
    const auto spec = sampled_spectrum(samples, grid);
    const double tail = spectral_tail_mass(spec);
    if (tail > opt.tail_tolerance) {
      const std::size_t req = required_points(spec, opt.tail_tolerance);
      std::ostringstream os;
      os << "spectrum not resolved at eps=" << e << " (tail mass " << tail << "); need about " << req
         << " grid points";
      throw ResolutionError(os.str(), req);
    }

    const auto b = amplitudes_of(p, e, t, pts);
    std::vector<cplx> v(N);
    if (p.eta_gradient) {
      const auto ys = feet_of(p, nullptr, e, t, pts);
      for (std::size_t i = 0; i < N; ++i) {
        const double y = ys[i][0];
        // e^{i y η_k} by recurrence from η_{-N/2}
        const cplx step = std::exp(kI * (y * deta));
        cplx z = std::exp(kI * (y * deta * static_cast<double>(-half)));
        cplx acc = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
          acc += z * spec[k];
          z *= step;
        }
        v[i] = b[i] * acc / L;
      }
    } else {
      for (std::size_t i = 0; i < N; ++i) {
        cplx acc = 0.0;
        for (long k = -half; k < half; ++k) {
          const double eta = deta * static_cast<double>(k);
          acc += std::exp(kI * p.phase(e, t, pts[i], std::span<const double>(&eta, 1))) *
                 spec[static_cast<std::size_t>(k + half)];
        }
        v[i] = b[i] * acc / L;
      }
    }
    out.values.push_back(std::move(v));
  }
  return out;
}

GridFunction solve_nonhomogeneous(const PhaseAmp& p, const CharFlow& flow, const ParamFamily& u0,
                                  const ParamFamily& f, double t, const UniformGrid& grid,
                                  const std::vector<double>& eps) {
  if (!f.valid() || f.is_zero()) return apply_fio_characteristic(p, flow, u0, t, grid, eps);
  grid.validate();
  if (u0.dimension() != grid.dim() || flow.dimension() != grid.dim())
    throw ArgumentError("solve_nonhomogeneous: dimension mismatch");
  GridFunction out{grid, t, eps, {}};
  const auto pts = grid.points();
  for (double e : eps) {
    std::vector<cplx> v(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto st = flow.trace_duhamel(e, pts[i], t, f);
      if (!(st.min_abs_b > 1e-12)) {
        auto w = pts[i];
        w.push_back(t);
        throw SolverError("amplitude underflow along the backward flow (|b| <= 1e-12)", e, w);
      }
      check_domain(u0, st.foot, e);
      v[i] = std::exp(kI * st.beta) * u0(e, st.foot) + kI * st.forcing;
    }
    out.values.push_back(std::move(v));
  }
  return out;
}

}  // namespace gfio
