#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "gfio/fio.hpp"
#include "gfio/scenario.hpp"

using namespace gfio;

namespace {

CoefficientSet constant_velocity(double c, ParamFamily a0 = {}) {
  CoefficientSet cs;
  cs.n = 1;
  cs.a1 = {ParamFamily::constant(2, -c)};
  cs.a0 = std::move(a0);
  return cs;
}

double max_diff(const GridFunction& u, const std::function<cplx(double)>& ref, std::size_t k = 0) {
  double m = 0.0;
  for (std::size_t j = 0; j < u.grid.size(); ++j) m = std::max(m, std::abs(u.values[k][j] - ref(u.grid.coord(0, j))));
  return m;
}

}  // namespace

TEST_CASE("characteristic form at t = 0 and under pure damping") {
  const auto g = gaussian_family({0.0}, 0.2);
  const auto grid = UniformGrid::line(-2, 2, 256);
  const auto flow = solve_characteristics(constant_velocity(0.0, ParamFamily::constant(2, kI)));
  const auto p = transport_amplitude(flow);
  const auto u0 = apply_fio_characteristic(p, *flow, g, 0.0, grid, {0.1});
  CHECK(max_diff(u0, [&](double x) { return g(0.1, x); }) < 1e-15);
  const auto u = apply_fio_characteristic(p, *flow, g, 1.5, grid, {0.1});
  CHECK(max_diff(u, [&](double x) { return std::exp(-1.5) * g(0.1, x); }) < 1e-9);
}

TEST_CASE("heaviside example transports a delta peak to the shift") {
  const auto s = resolve_scenario("heaviside1d");
  const auto flow = solve_characteristics(build_coefficients(s), s.tolerances.ode);
  const auto p = eikonal_phase(flow);
  const auto u0 = build_data(s, *s.data);
  const auto grid = UniformGrid::line(-4, 4, 4096);
  const std::vector<double> eps{1.0 / 64, 1.0 / 256};
  const auto u = apply_fio_characteristic(p, *flow, u0, 2.0, grid, eps);
  for (std::size_t k = 0; k < eps.size(); ++k) {
    std::size_t arg = 0;
    for (std::size_t j = 0; j < grid.size(); ++j)
      if (std::abs(u.values[k][j]) > std::abs(u.values[k][arg])) arg = j;
    CHECK(std::abs(grid.coord(0, arg) - closed_form_shift(s, eps[k], 2.0)) <= grid.spacing(0));
    CHECK(std::abs(grid.coord(0, arg) - 1.0) <= grid.spacing(0));
  }
}

TEST_CASE("oscillatory form: round trip, shift theorem and agreement with the characteristic form") {
  const auto g = gaussian_family({0.0}, 0.2);
  const auto grid = UniformGrid::line(-4, 4, 2048);
  const std::vector<double> eps{0.25, 1.0 / 64};

  const auto id = plane_shift_phase({0.0});
  const auto rt = apply_fio_oscillatory(id, g, 0.0, grid, eps);
  CHECK(max_diff(rt, [&](double x) { return g(0.1, x); }) <= 1e-10);

  const auto sh = apply_fio_oscillatory(plane_shift_phase({0.75}), g, 1.0, grid, eps);
  CHECK(max_diff(sh, [&](double x) { return g(0.1, x - 0.75); }) <= 1e-10);

  const auto s = resolve_scenario("heaviside1d");
  const auto flow = solve_characteristics(build_coefficients(s), s.tolerances.ode);
  const auto p = eikonal_phase(flow);
  const auto osc = apply_fio_oscillatory(p, g, 2.0, grid, {1.0 / 64});
  const auto chr = apply_fio_characteristic(p, *flow, g, 2.0, grid, {1.0 / 64});
  CHECK(max_abs_diff(osc, chr)[0] <= 1e-6);
}

TEST_CASE("oscillatory form rejects an unresolved spectrum") {
  const auto narrow = gaussian_family({0.0}, 0.002);
  const auto grid = UniformGrid::line(-4, 4, 256);
  try {
    apply_fio_oscillatory(plane_shift_phase({0.0}), narrow, 0.0, grid, {0.1});
    FAIL("expected ResolutionError");
  } catch (const ResolutionError& e) {
    CHECK(e.required_points() > 256);
    CHECK(is_power_of_two(e.required_points()));
  }
}

TEST_CASE("spectrum helpers") {
  const auto grid = UniformGrid::line(-4, 4, 512);
  std::vector<cplx> samples(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) samples[j] = std::exp(-4.0 * grid.coord(0, j) * grid.coord(0, j));
  const auto sp = sampled_spectrum(samples, grid);
  // DFT of a Gaussian approximates its Fourier transform (√π/2) e^{-η²/16} at η = 0
  CHECK(std::abs(sp[grid.size() / 2] - cplx(std::sqrt(kPi) / 2)) < 1e-12);
  CHECK(spectral_tail_mass(sp) < 1e-12);
}

TEST_CASE("duhamel form") {
  const auto grid = UniformGrid::line(-2, 2, 128);
  const auto u0 = gaussian_family({0.0}, 0.3);
  const auto gx = gaussian_family({0.2}, 0.5);
  const std::vector<double> eps{0.1};

  SUBCASE("f = 0 reproduces the homogeneous solution") {
    const auto flow = solve_characteristics(constant_velocity(0.5));
    const auto p = transport_amplitude(flow);
    const auto a = solve_nonhomogeneous(p, *flow, u0, ParamFamily::zero(2), 1.2, grid, eps);
    const auto b = apply_fio_characteristic(p, *flow, u0, 1.2, grid, eps);
    CHECK(max_abs_diff(a, b)[0] == 0.0);
  }
  SUBCASE("zero coefficients and time-independent forcing") {
    const auto flow = solve_characteristics(constant_velocity(0.0));
    const auto p = transport_amplitude(flow);
    const auto f = ParamFamily(2, [gx](double e, std::span<const double> q) { return gx(e, q.subspan(1)); });
    const auto u = solve_nonhomogeneous(p, *flow, u0, f, 1.5, grid, eps);
    CHECK(max_diff(u, [&](double x) { return u0(0.1, x) + kI * 1.5 * gx(0.1, x); }) < 1e-9);
  }
  SUBCASE("constant velocity oracle") {
    const double c = 0.8, t = 1.1;
    const auto flow = solve_characteristics(constant_velocity(c));
    const auto p = transport_amplitude(flow);
    const auto f = ParamFamily(2, [gx](double e, std::span<const double> q) { return gx(e, q.subspan(1)); });
    const auto u = solve_nonhomogeneous(p, *flow, u0, f, t, grid, eps);
    const auto ref = [&](double x) {
      const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double tau) { return gx(0.1, x - c * (t - tau)).real(); }, 0.0, t, 10, 1e-13);
      return u0(0.1, x - c * t) + kI * integral;
    };
    CHECK(max_diff(u, ref) < 1e-8);
  }
}
