#include <sstream>

#include "doctest.h"
#include "gfio/asymptotics.hpp"
#include "gfio/common.hpp"

using namespace gfio;

namespace {

NetSamples net(const std::function<double(double)>& f) { return NetSamples::sample(eps_grid(), f); }

}  // namespace

TEST_CASE("growth exponent of exact power laws") {
  CHECK(growth_exponent(net([](double e) { return std::pow(e, -2.0); })).slope == doctest::Approx(2.0).epsilon(0.025));
  CHECK(growth_exponent(net([](double e) { return std::pow(e, 3.0); })).slope == doctest::Approx(-3.0).epsilon(0.02));
  const auto lg = growth_exponent(net([](double e) { return std::log(1.0 / e); }));
  CHECK(lg.slope < 0.5);
  CHECK(lg.tail_slope < lg.slope);
  CHECK(lg.curved);
  CHECK(growth_exponent(net([](double) { return 0.0; })).negligible_signal);
}

TEST_CASE("classification of reference nets") {
  const auto lg = classify_net(net([](double e) { return std::log(1.0 / e); }));
  CHECK(lg.kind == GrowthKind::LogType);
  CHECK(lg.log_type);
  CHECK(lg.slow_scale);
  CHECK(lg.fit_quality >= 0.99);

  const auto m2 = classify_net(net([](double e) { return std::pow(e, -2.0); }));
  CHECK(m2.kind == GrowthKind::Moderate);
  CHECK(m2.moderate_exponent == 2);
  CHECK_FALSE(m2.slow_scale);
  CHECK(m2.fit_quality >= 0.99);

  // ε^{log(1/ε)} decays faster than any power without underflowing on the grid
  const auto ng = classify_net(net([](double e) { return std::pow(e, 3.0) * std::pow(e, std::log(1.0 / e)); }), 8);
  CHECK(ng.kind == GrowthKind::Negligible);
  CHECK(ng.fit_quality >= 0.99);

  const auto ex = classify_net(net([](double e) { return std::exp(-1.0 / e); }), 8);
  CHECK(ex.negligible);

  // constants are reported as their most specific class
  const auto one = classify_net(net([](double) { return 1.0; }));
  CHECK(one.kind == GrowthKind::LogType);
  CHECK(one.moderate_exponent == 0);
  CHECK(one.slow_scale);
}

TEST_CASE("powers of 1/eps are Moderate with the exact exponent") {
  for (int n = 1; n <= 3; ++n) {
    const auto c = classify_net(net([n](double e) { return std::pow(e, -n); }));
    CHECK(c.kind == GrowthKind::Moderate);
    CHECK(c.moderate_exponent == n);
    CHECK(c.slope <= n + kSlopeTolerance);
  }
}

TEST_CASE("classification is invariant under constant rescaling") {
  const std::vector<std::function<double(double)>> nets{
      [](double e) { return std::log(1.0 / e); },
      [](double e) { return std::pow(e, -2.0); },
      [](double e) { return std::pow(e, 3.0) * std::pow(e, std::log(1.0 / e)); },
      [](double e) { return std::sqrt(1.0 / e); },
  };
  for (const auto& f : nets) {
    const auto base = classify_net(net(f)).kind;
    for (double c : {1e-3, 0.1, 7.0, 1e3}) CHECK(classify_net(net([&](double e) { return c * f(e); })).kind == base);
  }
}

TEST_CASE("domination preserves negligibility") {
  const auto a = [](double e) { return std::pow(e, std::log(1.0 / e)); };
  const auto b = [&](double e) { return a(e) * (1.0 + std::sin(1.0 / e)) / 4.0; };
  REQUIRE(classify_net(net(a)).kind == GrowthKind::Negligible);
  CHECK(classify_net(net(b)).negligible);
}

TEST_CASE("strict nonzeroness") {
  const auto r = is_strictly_nonzero(net([](double e) { return std::sqrt(e); }));
  REQUIRE(r);
  CHECK(*r == doctest::Approx(0.5).epsilon(0.05));
  const auto c = is_strictly_nonzero(net([](double) { return 3.0; }));
  REQUIRE(c);
  CHECK(*c == 0.0);
  CHECK_FALSE(is_strictly_nonzero(net([](double e) { return std::exp(-1.0 / e); })));
}

TEST_CASE("invalid samples") {
  CHECK_THROWS_AS(classify_net(NetSamples{}), ArgumentError);
  CHECK_THROWS_AS(classify_net(NetSamples{{0.5, 0.25, 0.125}, {1, 2, 3}}), ArgumentError);
  CHECK_THROWS_AS(classify_net(NetSamples{{0.25, 0.5, 0.125, 0.1, 0.05, 0.01}, {1, 1, 1, 1, 1, 1}}), ArgumentError);
  CHECK_THROWS_AS(classify_net(net([](double) { return -1.0; })), ArgumentError);
}

TEST_CASE("linear fit and csv") {
  const auto f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  const auto s = net([](double e) { return 1.0 / e; });
  std::ostringstream os;
  write_csv(os, s, growth_exponent(s));
  CHECK(os.str().rfind("eps,value,fitted", 0) == 0);
}
