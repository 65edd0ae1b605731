#include <random>
#include <sstream>

#include "doctest.h"
#include "gfio/characteristics.hpp"
#include "gfio/ode.hpp"
#include "gfio/scenario.hpp"

using namespace gfio;

namespace {

// a(t, x) = c·x over (t, x), with derivatives
ParamFamily linear_in_x(double c) {
  return ParamFamily(
      2, [c](double, std::span<const double> p) { return cplx(c * p[1]); },
      [c](double, std::span<const double> p, std::span<const int> a) {
        if (a[0] > 0) return cplx(0.0);
        if (a[1] == 0) return cplx(c * p[1]);
        return cplx(a[1] == 1 ? c : 0.0);
      });
}

CoefficientSet one_dim(ParamFamily a1, ParamFamily a0 = {}) {
  CoefficientSet c;
  c.n = 1;
  c.a1 = {std::move(a1)};
  c.a0 = std::move(a0);
  return c;
}

std::vector<double> pt(double x) { return {x}; }

}  // namespace

TEST_CASE("dormand-prince integrates an exponential to tolerance") {
  std::vector<double> y{1.0};
  integrate_dopri([](double, const std::vector<double>& v, std::vector<double>& d) { d[0] = v[0]; }, 0.0, 1.0, y,
                  {1e-12, 1e-12});
  CHECK(y[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-10));
  y = {1.0};
  integrate_dopri([](double, const std::vector<double>& v, std::vector<double>& d) { d[0] = v[0]; }, 1.0, 0.0, y,
                  {1e-12, 1e-12});
  CHECK(y[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("zero coefficient gives the identity flow") {
  const auto flow = solve_characteristics(one_dim(ParamFamily::zero(2)));
  const auto st = flow->trace(0.1, pt(0.7), 1.5, 0.0);
  CHECK(st.gamma[0] == 0.7);
  CHECK(st.jac(0, 0) == 1.0);
  const auto p = eikonal_phase(flow);
  const std::vector<double> eta{2.0};
  CHECK(p.phase(0.1, 1.5, pt(0.7), eta) == doctest::Approx(1.4));
  CHECK(eikonal_residual(p, flow->coefficients(), {{1.0, 0.2}}, {0.1})[0] < 1e-12);
}

TEST_CASE("linear coefficient a1 = x: exponential flow and variational jacobian") {
  const auto flow = solve_characteristics(one_dim(linear_in_x(1.0)), 1e-10);
  for (double t : {0.5, 1.0, 2.0})
    for (double x : {-1.0, 0.3, 2.0}) {
      const auto st = flow->trace(0.5, pt(x), t, 0.0);
      CHECK(st.gamma[0] == doctest::Approx(x * std::exp(t)).epsilon(1e-8));
      CHECK(st.jac(0, 0) == doctest::Approx(std::exp(t)).epsilon(1e-8));
    }
  // jacobian against central differences of gamma
  const double h = 1e-4;
  const double x = 0.4, t = 1.3;
  const double fd = (flow->gamma(0.5, pt(x + h), t, 0.0)[0] - flow->gamma(0.5, pt(x - h), t, 0.0)[0]) / (2 * h);
  CHECK(flow->jac(0.5, pt(x), t, 0.0)(0, 0) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("flow initial condition and group property at random triples") {
  auto s = resolve_scenario("heaviside1d");
  const auto flow = solve_characteristics(build_coefficients(s), s.tolerances.ode);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> tt(0.0, 2.0), xx(-2.0, 2.0);
  for (double e : {0.25, 1.0 / 64, 1.0 / 4096}) {
    CHECK(flow->gamma(e, pt(0.3), 1.2, 1.2)[0] == 0.3);
    CHECK(flow->jac(e, pt(0.3), 1.2, 1.2)(0, 0) == 1.0);
    for (int i = 0; i < 50; ++i) {
      const double x = xx(rng), t = tt(rng), sv = tt(rng), r = tt(rng);
      const double mid = flow->gamma(e, pt(x), t, sv)[0];
      const double a = flow->gamma(e, pt(mid), sv, r)[0];
      const double b = flow->gamma(e, pt(x), t, r)[0];
      CHECK(std::abs(a - b) <= 10 * s.tolerances.ode);
      CHECK(flow->jac(e, pt(x), t, 0.0).determinant() > 0.0);
    }
  }
}

TEST_CASE("heaviside coefficient matches the closed-form shift") {
  const auto s = resolve_scenario("heaviside1d");
  const auto flow = solve_characteristics(build_coefficients(s), s.tolerances.ode);
  const auto p = eikonal_phase(flow);
  const std::vector<double> eta{1.0};
  for (double e : {0.25, 1.0 / 64, 1.0 / 65536})
    for (double t : {0.0, 0.5, 1.0, 1.5, 2.0}) {
      const double lam = closed_form_shift(s, e, t);
      CHECK(std::abs(flow->gamma(e, pt(0.2), t, 0.0)[0] - (0.2 - lam)) <= 1e-7);
      CHECK(std::abs(p.phase(e, t, pt(0.2), eta) - (0.2 - lam)) <= 1e-7);
    }
  CHECK(closed_form_shift(s, 1.0 / 64, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(closed_form_shift(s, 1.0 / 64, 0.5) == 0.0);
}

TEST_CASE("phase is homogeneous in eta and equals x·eta at t = 0") {
  const auto s = resolve_scenario("heaviside2d");
  const auto flow = solve_characteristics(build_coefficients(s), s.tolerances.ode);
  const auto p = eikonal_phase(flow);
  const std::vector<double> x{0.3, -0.2}, eta{0.6, 0.8}, eta3{1.8, 2.4};
  CHECK(p.phase(0.1, 0.0, x, eta) == doctest::Approx(0.3 * 0.6 - 0.2 * 0.8));
  CHECK(p.phase(0.1, 1.7, x, eta3) == doctest::Approx(3.0 * p.phase(0.1, 1.7, x, eta)).epsilon(1e-14));
}

TEST_CASE("constant velocity: plane shift phase and small residual") {
  CoefficientSet c;
  c.n = 2;
  c.a1 = {ParamFamily::constant(3, -1.0), ParamFamily::constant(3, -2.0)};
  const auto flow = solve_characteristics(c);
  const auto p = eikonal_phase(flow);
  const auto ref = plane_shift_phase({1.0, 2.0});
  const std::vector<double> x{0.5, 0.5}, eta{1.0, -1.0};
  CHECK(p.phase(0.1, 1.5, x, eta) == doctest::Approx(ref.phase(0.1, 1.5, x, eta)).epsilon(1e-9));
  CHECK(eikonal_residual(p, c, {{1.0, 0.1, 0.2}}, {0.1})[0] < 1e-6);
}

TEST_CASE("eikonal residual on the heaviside example at fixed eps") {
  const auto s = resolve_scenario("heaviside1d");
  const auto cs = build_coefficients(s);
  const auto p = eikonal_phase(solve_characteristics(cs, 1e-9));
  const auto r = eikonal_residual(p, cs, {{0.9, 0.0}, {1.0, 0.3}, {1.1, -0.2}, {2.0, 1.0}}, {1.0 / 64});
  CHECK(r[0] <= 1e-6);
}

TEST_CASE("transport amplitude closed forms") {
  SUBCASE("a0 = 0") {
    const auto p = transport_amplitude(solve_characteristics(one_dim(linear_in_x(1.0))));
    CHECK(std::abs(p.amplitude(0.1, 1.0, pt(0.4)) - cplx(1.0)) < 1e-15);
  }
  SUBCASE("a0 = i k damps") {
    const double k = 0.7;
    const auto p = transport_amplitude(solve_characteristics(one_dim(ParamFamily::zero(2), ParamFamily::constant(2, kI * k))));
    for (double t : {0.0, 0.5, 2.0}) {
      CHECK(std::abs(p.amplitude(0.1, t, pt(0.4)) - std::exp(-k * t)) < 1e-9);
      CHECK(std::abs(std::abs(p.amplitude(0.1, t, pt(0.4))) - std::exp(-p.beta(0.1, t, pt(0.4)).imag())) < 1e-14);
    }
  }
  SUBCASE("a0 = x with a1 = 0") {
    const auto p = transport_amplitude(solve_characteristics(one_dim(ParamFamily::zero(2), linear_in_x(1.0))));
    for (double x : {-0.5, 0.3})
      for (double t : {0.5, 1.5}) {
        CHECK(std::abs(p.beta(0.1, t, pt(x)) - cplx(x * t)) < 1e-9);
        CHECK(std::abs(p.amplitude(0.1, t, pt(x)) - std::exp(kI * x * t)) < 1e-9);
      }
  }
}

TEST_CASE("invalid input is rejected") {
  CHECK_THROWS_AS(solve_characteristics(one_dim(ParamFamily::zero(2)), 0.0), ArgumentError);
  CoefficientSet bad;
  bad.n = 2;
  bad.a1 = {ParamFamily::zero(3)};
  CHECK_THROWS_AS(solve_characteristics(bad), ArgumentError);
  const auto flow = solve_characteristics(one_dim(ParamFamily::zero(2)));
  const std::vector<double> two{0.0, 0.0};
  CHECK_THROWS_AS(flow->gamma(0.1, two, 1.0, 0.0), ArgumentError);
}

TEST_CASE("trajectory csv") {
  const auto s = resolve_scenario("heaviside1d");
  const auto flow = solve_characteristics(build_coefficients(s));
  std::ostringstream os;
  write_trajectory_csv(os, *flow, {0.25}, {{0.0}, {1.0}}, 2.0, {0.0, 1.0});
  const auto text = os.str();
  CHECK(text.rfind("eps,x1,t,s,gamma1,detjac\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}
