// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gfio/asymptotics.hpp"
#include "gfio/runner.hpp"
#include "gfio/scenario.hpp"

using namespace gfio;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

class Suite {
 public:
  const Report& report(const std::string& name) {
    auto it = reports_.find(name);
    if (it != reports_.end()) return it->second;
    const auto t0 = std::chrono::steady_clock::now();
    Report r;
    try {
      r = run_scenario(resolve_scenario(name));
    } catch (const Error& e) {
      r.scenario = name;
      r.checks.push_back({"run", "run", false, 0.0, 0.0, e.what()});
    }
    std::fprintf(stderr, "ran %s in %.1f s\n", name.c_str(), seconds_since(t0));
    return reports_.emplace(name, std::move(r)).first->second;
  }

  // every check of `scenario` whose name starts with `prefix`
  void checks(Outcome& o, const std::string& scenario, const std::string& prefix, std::size_t at_least = 1) {
    const auto& r = report(scenario);
    std::size_t n = 0;
    for (const auto& c : r.checks)
      if (c.name.rfind(prefix, 0) == 0) {
        ++n;
        o.require(c.passed, scenario + ":" + c.name + "=" + fmt(c.value) + (c.detail.empty() ? "" : " (" + c.detail + ")"));
      }
    if (n < at_least) o.require(false, scenario + ": no check named " + prefix + "*");
  }

 private:
  std::map<std::string, Report> reports_;
};

Outcome flow_closed_form() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = resolve_scenario("heaviside1d");
  const auto flow = solve_characteristics(build_coefficients(s), 1e-9);
  double worst = 0.0;
  for (double e : s.eps())
    for (double t : {0.0, 0.5, 1.0, 1.5, 2.0}) {
      const double lam = closed_form_shift(s, e, t);
      for (double x : {-1.0, 0.0, 0.5, 1.0}) {
        const std::vector<double> p{x};
        worst = std::max(worst, std::abs(flow->gamma(e, p, t, 0.0)[0] - (x - lam)));
      }
    }
  const double secs = seconds_since(t0);
  o.require(worst <= 1e-7, "max |gamma - (x - Lambda)| = " + fmt(worst));
  o.require(secs <= 10.0, "runtime " + fmt(secs) + " s");
  return o;
}

Outcome jump_midpoint(Suite& suite) {
  Outcome o;
  double worst = 0.0;
  const auto s = resolve_scenario("heaviside1d");
  const auto h = build_time_profile(s);
  for (double e : s.eps()) worst = std::max(worst, std::abs(h(e, s.coefficient->at).real() - 0.5));
  for (auto kind : {MollifierKind::polynomial_bump, MollifierKind::smoothed_cosine}) {
    const auto hc = embed_heaviside(make_mollifier(kind, 1.0), ScaleNet::slow_scale(), 1.0);
    for (double e : s.eps()) worst = std::max(worst, std::abs(hc(e, 1.0).real() - 0.5));
  }
  o.require(worst <= 1e-10, "max |lambda_eps(1) - 1/2| = " + fmt(worst));
  const auto d = resolve_scenario("delta_coeff");
  double dw = 0.0;
  for (double e : d.eps()) dw = std::max(dw, std::abs(closed_form_shift(d, e, 1.0) - 0.5));
  o.require(dw <= 1e-10, "delta coefficient shift at t=1 off 1/2 by " + fmt(dw));
  suite.checks(o, "delta_coeff", "shift_t=1");
  return o;
}

Outcome net_classification() {
  Outcome o;
  const auto grid = eps_grid();
  const auto lg = classify_net(NetSamples::sample(grid, [](double e) { return std::log(1.0 / e); }), 8);
  o.require(lg.kind == GrowthKind::LogType && lg.fit_quality >= 0.99,
            "log(1/eps) -> " + lg.describe() + " R2=" + fmt(lg.fit_quality));
  const auto m2 = classify_net(NetSamples::sample(grid, [](double e) { return std::pow(e, -2.0); }), 8);
  o.require(m2.kind == GrowthKind::Moderate && m2.moderate_exponent == 2 && !m2.slow_scale && m2.fit_quality >= 0.99,
            "eps^-2 -> " + m2.describe() + (m2.slow_scale ? " slow-scale" : " not slow-scale") +
                " R2=" + fmt(m2.fit_quality));
  // ε^{log(1/ε)} is negligible and stays above the underflow threshold on the grid
  const auto ng = classify_net(
      NetSamples::sample(grid, [](double e) { return std::pow(e, 3.0) * std::pow(e, std::log(1.0 / e)); }), 8);
  o.require(ng.kind == GrowthKind::Negligible && ng.fit_quality >= 0.99,
            "eps^3 * eps^log(1/eps) -> " + ng.describe() + " R2=" + fmt(ng.fit_quality));
  return o;
}

Outcome limitations_statement() {
  Outcome o;
  std::ifstream in(GFIO_README);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto text = ss.str();
  o.require(!text.empty(), "README readable");
  for (const char* needle : {"## Limitations", "desk scale", "negligible nets", "crossing time t = 1"})
    o.require(text.find(needle) != std::string::npos, std::string("README mentions '") + needle + "'");
  return o;
}

}  // namespace

int main() {
  Suite suite;
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"heaviside flow closed form", flow_closed_form},
      {"jump midpoint", [&] { return jump_midpoint(suite); }},
      {"limit flow",
       [&] {
         Outcome o;
         suite.checks(o, "heaviside1d", "flow_limit_t=", 2);
         suite.checks(o, "heaviside1d", "limit_flow_t=", 2);
         return o;
       }},
      {"wave front propagation",
       [&] {
         Outcome o;
         suite.checks(o, "heaviside1d", "wf_propagation_t=", 2);
         suite.checks(o, "heaviside1d", "control_regular_t=", 2);
         return o;
       }},
      {"space-time wave front bound",
       [&] {
         Outcome o;
         suite.checks(o, "heaviside1d", "spacetime_wf");
         return o;
       }},
      {"2D conormal propagation",
       [&] {
         Outcome o;
         suite.checks(o, "heaviside2d", "shift_t=2");
         suite.checks(o, "heaviside2d", "wf_propagation_t=2");
         return o;
       }},
      {"FIO equivalence",
       [&] {
         Outcome o;
         for (const char* s : {"heaviside1d", "delta_coeff", "smooth1d"}) suite.checks(o, s, "fio_equivalence");
         return o;
       }},
      {"eikonal residual",
       [&] {
         Outcome o;
         for (const char* s : {"heaviside1d", "delta_coeff", "smooth1d", "heaviside2d"})
           suite.checks(o, s, "eikonal_residual");
         suite.checks(o, "pseudo_parametrix", "pseudo_eikonal_residual");
         return o;
       }},
      {"net classification", net_classification},
      {"parametrix hierarchy",
       [&] {
         Outcome o;
         suite.checks(o, "pseudo_parametrix", "parametrix_slope_drop_K=", 2);
         suite.checks(o, "pseudo_parametrix", "flat_lower_order_term_vanishes");
         return o;
       }},
      {"limitations statement", limitations_statement},
  };

  const auto t0 = std::chrono::steady_clock::now();
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    all = all && o.passed;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.passed ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %s in %.1f s\n", all ? "all criteria passed" : "criteria FAILED", seconds_since(t0));
  return all ? 0 : 1;
}
