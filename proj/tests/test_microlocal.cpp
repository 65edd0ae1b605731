#include <sstream>

#include "doctest.h"
#include "gfio/microlocal.hpp"
#include "gfio/scenario.hpp"

using namespace gfio;

namespace {

WFProbe probe_at(double c, double dir, const std::vector<double>& eps) {
  WFProbe p;
  p.center = {c};
  p.radius = 0.25;
  p.direction = {dir};
  p.eps_subgrid = default_eps_subgrid(eps, p.xi_max());
  return p;
}

WFRecord rec(std::vector<double> x, std::vector<double> d) {
  WFRecord r;
  r.position = std::move(x);
  r.direction = std::move(d);
  r.verdict = Verdict::Singular;
  return r;
}

const auto kDelta = embed_delta(make_mollifier(MollifierKind::polynomial_bump, 1.0), ScaleNet::identity(), 0.0);

}  // namespace

TEST_CASE("probe geometry") {
  auto p = probe_at(0.0, 1.0, eps_grid());
  CHECK(p.window({0.0}) == 1.0);
  CHECK(p.window({0.26}) == 0.0);
  CHECK(p.xi_max() == doctest::Approx(9.0 / (0.25 / 8.0)));
  for (double e : p.eps_subgrid) CHECK(e * p.xi_max() <= 1.0);
  CHECK(p.eps_subgrid.size() == 2);
  CHECK(sampling_step(100.0, 0.003) == doctest::Approx(0.001));
  p.half_angle = 2.0;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  CHECK(default_directions(1).size() == 2);
  CHECK(default_directions(2).size() == 16);
}

TEST_CASE("directional decay on known fields") {
  const auto eps = eps_grid();
  const auto gauss = gaussian_family({0.0}, 0.1);
  for (double d : {-1.0, 1.0}) {
    const auto g = directional_decay(gauss, probe_at(0.0, d, eps));
    CHECK(g.verdict == Verdict::Regular);
    CHECK(g.min_decay() >= 5.0);

    const auto s = directional_decay(kDelta, probe_at(0.0, d, eps));
    CHECK(s.verdict == Verdict::Singular);
    CHECK(s.min_decay() < 1.0);
    CHECK(s.uniformity > 0.0);

    CHECK(directional_decay(kDelta, probe_at(1.0, d, eps)).verdict == Verdict::Regular);
  }
}

TEST_CASE("wave front of a regularized delta and of a jump") {
  const auto eps = eps_grid();
  std::vector<std::vector<double>> centers;
  for (int i = -4; i <= 4; ++i) centers.push_back({0.25 * i});
  const auto wf = estimate_wavefront(kDelta, centers, default_directions(1), probe_at(0.0, 1.0, eps));
  const auto sing = wf.singular();
  REQUIRE(sing.size() == 2);
  for (const auto& r : sing) CHECK(std::abs(r.position[0]) < 1e-12);

  const auto jump = embed_heaviside(make_mollifier(MollifierKind::polynomial_bump, 1.0), ScaleNet::identity(), 0.0);
  const auto wh = estimate_wavefront(jump, centers, default_directions(1), probe_at(0.0, 1.0, eps)).singular();
  CHECK(wh.size() == 2);
  for (const auto& r : wh) CHECK(std::abs(r.position[0]) < 1e-12);

  // conic invariance: rescaling the data does not change any verdict
  const auto scaled = cplx(-250.0) * kDelta;
  const auto ws = estimate_wavefront(scaled, centers, default_directions(1), probe_at(0.0, 1.0, eps));
  REQUIRE(ws.records.size() == wf.records.size());
  for (std::size_t i = 0; i < ws.records.size(); ++i) CHECK(ws.records[i].verdict == wf.records[i].verdict);

  std::ostringstream os;
  write_csv(os, wf);
  CHECK(os.str().rfind("x0,xi0,decay_rate,uniformity,verdict\n", 0) == 0);
}

TEST_CASE("hamiltonian flow of the heaviside example") {
  const auto s = resolve_scenario("heaviside1d");
  const auto flow = solve_characteristics(build_coefficients(s), s.tolerances.ode);
  const auto eps = s.eps();
  const std::vector<std::vector<double>> xs{{-1.0}, {0.0}, {0.5}, {1.0}};

  const auto id = hamiltonian_flow(flow, 0.0, eps, xs);
  const auto [y0, e0] = id.chi(1.0 / 64, {0.3}, {2.0});
  CHECK(y0[0] == 0.3);
  CHECK(e0[0] == 2.0);

  const auto fm = hamiltonian_flow(flow, 2.0, eps, xs);
  REQUIRE(fm.has_limit());
  CHECK(fm.cauchy_gap() <= 1e-3);
  for (const auto& x : xs) {
    const auto [y, eta] = fm.chi_limit(x, {1.0});
    CHECK(std::abs(y[0] - (x[0] - 1.0)) <= 1e-3);
    CHECK(std::abs(eta[0] - 1.0) <= 1e-3);
    const auto [y2, eta2] = fm.chi(1.0 / 64, x, {2.0});
    const auto [y1, eta1] = fm.chi(1.0 / 64, x, {1.0});
    CHECK(y2[0] == y1[0]);
    CHECK(eta2[0] == 2.0 * eta1[0]);
  }
  CHECK(fm.bijectivity_error(xs, {{1.0}, {-1.0}}) <= 10 * s.tolerances.ode);

  WFEstimate wf0;
  wf0.records = {rec({0.0}, {1.0}), rec({0.0}, {-1.0})};
  const auto pred = predict_wavefront(fm, wf0);
  REQUIRE(pred.size() == 2);
  for (const auto& r : pred) {
    CHECK(r.position[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(std::abs(r.direction[0]) - 1.0) < 1e-12);
  }
  const auto same = predict_wavefront(id, wf0);
  CHECK(same[0].position[0] == doctest::Approx(0.0));
}

TEST_CASE("delta coefficient limit at the jump time") {
  const auto s = resolve_scenario("delta_coeff");
  const auto flow = solve_characteristics(build_coefficients(s), s.tolerances.ode);
  const auto fm = hamiltonian_flow(flow, 1.0, s.eps(), {{-0.5}, {0.0}, {0.5}});
  REQUIRE(fm.has_limit());
  const auto [y, eta] = fm.chi_limit({0.2}, {1.0});
  CHECK(y[0] == doctest::Approx(0.2 - 0.5).epsilon(1e-6));
  CHECK(eta[0] == doctest::Approx(1.0));
}

TEST_CASE("space-time bound for the heaviside example") {
  const LimitPhase phi = [](double t, const std::vector<double>& x, const std::vector<double>& eta) {
    return (x[0] - std::max(t - 1.0, 0.0)) * eta[0];
  };
  const std::vector<WFRecord> wf0{rec({0.0}, {1.0}), rec({0.0}, {-1.0})};
  const std::vector<Interval> excl{{0.9, 1.1}};
  const auto early = spacetime_wf_bound(phi, wf0, {0.0, 0.5}, excl);
  REQUIRE(early.size() == 4);
  for (const auto& r : early) {
    CHECK(std::abs(r.position[1]) < 1e-9);
    CHECK(std::abs(r.direction[0]) < 1e-6);
  }
  const auto late = spacetime_wf_bound(phi, wf0, {1.5, 2.0}, excl);
  REQUIRE(late.size() == 4);
  for (const auto& r : late) {
    CHECK(r.position[1] == doctest::Approx(r.position[0] - 1.0));
    CHECK(r.direction[0] == doctest::Approx(-r.direction[1]).epsilon(1e-6));
  }
  CHECK_THROWS_AS(spacetime_wf_bound(phi, wf0, {1.0}, excl), ArgumentError);

  const LimitPhase still = [](double, const std::vector<double>& x, const std::vector<double>& eta) {
    return x[0] * eta[0];
  };
  const auto st = spacetime_wf_bound(still, {rec({0.4}, {1.0})}, {0.7}, {});
  REQUIRE(st.size() == 1);
  CHECK(st[0].position[1] == doctest::Approx(0.4));
  CHECK(std::abs(st[0].direction[0]) < 1e-6);
}

TEST_CASE("comparison of record sets") {
  const std::vector<WFRecord> pred{rec({1.0}, {1.0}), rec({1.0}, {-1.0})};
  const auto same = compare_wf(pred, pred, 0.25, 0.1);
  CHECK(same.ok());
  CHECK(same.matches.size() == 2);

  const std::vector<WFRecord> half{rec({1.125}, {1.0}), rec({1.125}, {-1.0})};
  CHECK(compare_wf(half, pred, 0.25, 0.1).ok());

  const std::vector<WFRecord> extra{rec({1.0}, {1.0}), rec({1.0}, {-1.0}), rec({-2.0}, {1.0})};
  const auto cmp = compare_wf(extra, pred, 0.25, 0.1);
  CHECK(cmp.misses.empty());
  CHECK(cmp.spurious.size() == 1);

  const auto miss = compare_wf({rec({1.0}, {1.0})}, pred, 0.25, 0.1);
  CHECK(miss.misses.size() == 1);
  CHECK(direction_angle({1.0, 0.0}, {0.0, 2.0}) == doctest::Approx(kPi / 2));
}
