#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <random>

#include "doctest.h"
#include "gfio/asymptotics.hpp"
#include "gfio/regularization.hpp"

using namespace gfio;

namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 8, 1e-12);
}

double re(cplx z) { return z.real(); }

}  // namespace

TEST_CASE("mollifiers are normalized, symmetric, nonnegative and compactly supported") {
  for (auto kind : {MollifierKind::polynomial_bump, MollifierKind::smoothed_cosine})
    for (double r : {0.5, 1.0, 2.0}) {
      const auto m = make_mollifier(kind, r);
      CHECK(integrate([&](double z) { return m(z); }, -r, r) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(m(1.01 * r) == 0.0);
      CHECK(m(-1.01 * r) == 0.0);
      for (double z : {0.1, 0.37, 0.8}) {
        CHECK(m(z * r) >= 0.0);
        CHECK(m(z * r) == doctest::Approx(m(-z * r)).epsilon(1e-15));
      }
      CHECK(m.cdf(0.0) == 0.5);
      CHECK(m.moments()[0] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(m.moments()[1]) < 1e-14);
    }
}

TEST_CASE("smoothed cosine constant matches the quadrature oracle") {
  const auto m = make_mollifier(MollifierKind::smoothed_cosine, 1.0);
  const double mass = integrate([](double z) { return std::pow(std::cos(kPi * z / 2), 2); }, -1, 1);
  CHECK(m(0.0) == doctest::Approx(1.0 / mass).epsilon(1e-12));
  CHECK(m(0.3) == doctest::Approx(std::pow(std::cos(kPi * 0.15), 2) / mass).epsilon(1e-12));
}

TEST_CASE("polynomial bump has the expected shape") {
  const auto m = make_mollifier(MollifierKind::polynomial_bump, 1.0);
  const double c = m(0.0);
  CHECK(m(0.5) == doctest::Approx(c * std::pow(0.75, 4)).epsilon(1e-14));
  const auto m2 = make_mollifier(MollifierKind::polynomial_bump, 2.0);
  CHECK(m2(1.0) == doctest::Approx(m(0.5) / 2.0).epsilon(1e-14));
}

TEST_CASE("mollifier rejects bad input") {
  CHECK_THROWS_AS(make_mollifier(MollifierKind::polynomial_bump, 0.0), ArgumentError);
  CHECK_THROWS_AS(Mollifier([](double, int) { return 0.0; }, 1.0, "zero"), ArgumentError);
  CHECK_THROWS_AS(parse_mollifier_kind("triangle"), ArgumentError);
}

TEST_CASE("scale nets") {
  const auto id = ScaleNet::identity();
  const auto slow = ScaleNet::slow_scale();
  for (double e : eps_grid()) {
    CHECK(id(e) == e);
    CHECK(slow(e) > 0.0);
    CHECK(slow(e) < 1.0);
  }
  CHECK(slow(1e-300) < slow(1e-3));
  CHECK(ScaleNet::power(2.0, 0.5)(0.25) == doctest::Approx(1.0));
  CHECK_THROWS_AS(parse_scale_net("quadratic"), ArgumentError);

  // the reciprocal of the slow-scale width passes the slow-scale classifier
  const auto s = NetSamples::sample(eps_grid(), [&](double e) { return 1.0 / slow(e); });
  const auto c = classify_net(s);
  CHECK(c.slow_scale);
}

TEST_CASE("embedded Heaviside: midpoint, plateaus and monotonicity") {
  for (auto kind : {MollifierKind::polynomial_bump, MollifierKind::smoothed_cosine}) {
    const auto m = make_mollifier(kind, 1.0);
    const auto w = ScaleNet::slow_scale();
    const auto h = embed_heaviside(m, w, 1.0);
    for (double e : eps_grid()) {
      CHECK(std::abs(re(h(e, 1.0)) - 0.5) <= 1e-10);
      CHECK(re(h(e, 1.0 + 2.0 * w(e))) == 1.0);
      CHECK(re(h(e, 1.0 - 2.0 * w(e))) == 0.0);
      double prev = -1.0;
      for (int i = 0; i <= 200; ++i) {
        const double t = 1.0 - 1.5 * w(e) + 3.0 * w(e) * i / 200.0;
        const double v = re(h(e, t));
        CHECK(v >= prev - 1e-15);
        prev = v;
      }
    }
  }
}

TEST_CASE("embedded delta keeps unit mass and scales like 1/w") {
  const auto m = make_mollifier(MollifierKind::polynomial_bump, 1.0);
  const auto w = ScaleNet::identity();
  const auto d = embed_delta(m, w, 0.3);
  for (double e : eps_grid()) {
    const double mass = integrate([&](double x) { return re(d(e, x)); }, 0.3 - e, 0.3 + e);
    CHECK(std::abs(mass - 1.0) <= 1e-10);
    CHECK(re(d(e, 0.3)) == doctest::Approx(m(0.0) / e).epsilon(1e-13));
  }
  const auto s = NetSamples::sample(eps_grid(), [&](double e) { return re(d(e, 0.3)); });
  const auto c = classify_net(s);
  CHECK(c.kind == GrowthKind::Moderate);
  CHECK(c.moderate_exponent == 1);
}

TEST_CASE("analytic derivatives agree with finite differences at random points") {
  const auto m = make_mollifier(MollifierKind::polynomial_bump, 1.0);
  const auto w = ScaleNet::slow_scale();
  std::vector<ParamFamily> fams{embed_heaviside(m, w, 1.0), embed_delta(m, w, 1.0),
                                gaussian_family({0.2}, 0.3)};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> pos(0.3, 1.7);
  const double e = 0.25;
  for (const auto& f : fams) {
    REQUIRE(f.has_analytic_derivative());
    for (int i = 0; i < 100; ++i) {
      const double x = pos(rng);
      const int a = 1;
      const auto an = f.derivative(e, std::span<const double>(&x, 1), std::span<const int>(&a, 1));
      const auto fd = f.fd_derivative(e, std::span<const double>(&x, 1), std::span<const int>(&a, 1), 1e-4);
      // the bump is only C^3 at its edges, so allow the FD error there
      CHECK(std::abs(an - fd) <= 1e-5 * (1.0 + std::abs(an)));
    }
  }
}

TEST_CASE("curve delta: line values, transverse mass and circle mass") {
  const auto m = make_mollifier(MollifierKind::polynomial_bump, 1.0);
  const auto w = ScaleNet::identity();
  const auto one = ParamFamily::constant(2, 1.0);
  const auto line = embed_curve_delta(m, w, PlanarCurve::line({0, 0}, {1, 0}, -5, 5), one);
  const double e = 0.05;
  const std::vector<double> p{0.3, 0.0};
  CHECK(re(line(e, p)) == doctest::Approx(m(0.0) / e).epsilon(1e-12));
  const double across = integrate(
      [&](double y) {
        const std::vector<double> q{0.3, y};
        return re(line(e, q));
      },
      -e, e);
  CHECK(across == doctest::Approx(1.0).epsilon(1e-9));

  const auto cutoff = plateau_cutoff({0.0, 0.0}, 2.0, 3.0);
  const auto circle = embed_curve_delta(m, w, PlanarCurve::circle({0, 0}, 1.0), cutoff);
  // polar coordinates: ∫∫ f = ∫_0^{2π} ∫ f(r, θ) r dr dθ
  const double mass = integrate(
      [&](double th) {
        return integrate(
            [&](double r) {
              const std::vector<double> q{r * std::cos(th), r * std::sin(th)};
              return re(circle(e, q)) * r;
            },
            1 - e, 1 + e);
      },
      0.0, 2 * kPi);
  CHECK(std::abs(mass - 2 * kPi) <= 0.02 * 2 * kPi);
}

TEST_CASE("curve projection") {
  const auto c = PlanarCurve::circle({0, 0}, 1.0);
  const auto pr = project_onto_curve(c, {1.2, 0.0});
  CHECK(pr.unique);
  CHECK(std::abs(std::abs(pr.signed_distance) - 0.2) < 1e-12);
  CHECK(pr.foot[0] == doctest::Approx(1.0));
  CHECK(std::abs(pr.foot[1]) < 1e-12);
}

TEST_CASE("smooth embedding is constant in eps") {
  const auto f = embed_smooth(
      1, [](std::span<const double> p) { return cplx(std::sin(p[0])); },
      [](std::span<const double> p, std::span<const int> a) {
        return cplx(std::sin(p[0] + 0.5 * kPi * static_cast<double>(a[0])));
      });
  const double x = 0.4;
  const int a = 1;
  for (double e : eps_grid()) {
    CHECK(re(f(e, x)) == std::sin(x));
    CHECK(re(f.derivative(e, std::span<const double>(&x, 1), std::span<const int>(&a, 1))) ==
          doctest::Approx(std::cos(x)).epsilon(1e-15));
  }
  const auto s = NetSamples::sample(eps_grid(), [&](double e) { return std::abs(f(e, 1.0)); });
  const auto c = classify_net(s);
  CHECK(c.moderate_exponent == 0);
  CHECK(c.slow_scale);
  CHECK(ParamFamily::zero(1)(0.1, 0.3) == cplx(0.0));
}
