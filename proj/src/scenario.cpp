#include "gfio/scenario.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#ifndef GFIO_SCENARIO_DIR
#define GFIO_SCENARIO_DIR "scenarios"
#endif

namespace gfio {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw ArgumentError(origin + ": " + msg);
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& origin,
                const std::string& where) {
  if (!j.is_object()) fail(origin, where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) fail(origin, "unknown key '" + k + "' in " + where);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<Interval> intervals(const json& j, const std::string& origin) {
  std::vector<Interval> out;
  for (const auto& iv : j) {
    if (!iv.is_array() || iv.size() != 2) fail(origin, "intervals are [lo, hi] pairs");
    out.push_back({iv[0].get<double>(), iv[1].get<double>()});
  }
  return out;
}

DataSpec parse_data(const json& j, const std::string& origin, const std::string& where) {
  check_keys(j, {"kind", "center", "width", "scale", "direction", "cutoff_inner", "cutoff_outer"}, origin, where);
  DataSpec d;
  d.kind = j.at("kind").get<std::string>();
  d.center = j.at("center").get<std::vector<double>>();
  d.width = get_or(j, "width", d.width);
  d.scale = get_or(j, "scale", d.scale);
  d.direction = get_or(j, "direction", d.direction);
  d.cutoff_inner = get_or(j, "cutoff_inner", d.cutoff_inner);
  d.cutoff_outer = get_or(j, "cutoff_outer", d.cutoff_outer);
  return d;
}

void validate_data(const DataSpec& d, std::size_t dim, const std::string& where) {
  if (d.center.size() != dim) throw ArgumentError(where + ": center has the wrong dimension");
  parse_scale_net(d.scale);
  if (d.kind == "gaussian") {
    if (!(d.width > 0.0)) throw ArgumentError(where + ": gaussian width must be > 0");
  } else if (d.kind == "delta" || d.kind == "heaviside") {
    if (dim != 1) throw ArgumentError(where + ": " + d.kind + " data need dimension 1 (use curve-delta in 2D)");
  } else if (d.kind == "curve-delta") {
    if (dim != 2) throw ArgumentError(where + ": curve-delta data need dimension 2");
    if (d.direction.size() != 2 || std::hypot(d.direction[0], d.direction[1]) == 0.0)
      throw ArgumentError(where + ": curve-delta needs a nonzero 2D direction");
    if (!(d.cutoff_outer > d.cutoff_inner && d.cutoff_inner >= 0.0))
      throw ArgumentError(where + ": need 0 <= cutoff_inner < cutoff_outer");
  } else {
    throw ArgumentError(where + ": unknown data kind '" + d.kind + "'");
  }
}

}  // namespace

std::vector<double> Scenario::eps() const { return eps_grid(eps_k_min, eps_k_max); }

void Scenario::validate() const {
  if (name.empty()) throw ArgumentError("scenario: name is empty");
  if (dimension != 1 && dimension != 2) throw ArgumentError("scenario: dimension must be 1 or 2");
  if (eps_k_min < 0 || eps_k_max < eps_k_min || eps_k_max > 52)
    throw ArgumentError("scenario: eps exponents need 0 <= k_min <= k_max <= 52");
  parse_mollifier_kind(mollifier);
  if (!(support_radius > 0.0)) throw ArgumentError("scenario: support_radius must be > 0");
  if (!(tolerances.ode > 0.0 && tolerances.eikonal > 0.0 && tolerances.fio > 0.0 && tolerances.flow_limit > 0.0))
    throw ArgumentError("scenario: tolerances must be positive");

  if (!coefficient && !pseudo) throw ArgumentError("scenario: needs a coefficient or a pseudo block");
  if (coefficient) {
    const auto& c = *coefficient;
    static const std::set<std::string> kinds{"heaviside", "delta", "smooth", "constant"};
    if (!kinds.count(c.kind)) throw ArgumentError("scenario: unknown coefficient kind '" + c.kind + "'");
    if (c.velocity.size() != dimension) throw ArgumentError("scenario: velocity must have one entry per dimension");
    parse_scale_net(c.scale);
    if (!data) throw ArgumentError("scenario: a coefficient scenario needs data");
    if (times.empty()) throw ArgumentError("scenario: times are empty");
    for (double t : times)
      if (!(t >= 0.0)) throw ArgumentError("scenario: times must be >= 0");
    if (grid.dim() != dimension) throw ArgumentError("scenario: grid dimension does not match");
    grid.validate();
  }
  if (data) validate_data(*data, dimension, "data");
  if (control) validate_data(*control, dimension, "control");
  if (wavefront) {
    const auto& w = *wavefront;
    if (w.lo.size() != dimension || w.hi.size() != dimension)
      throw ArgumentError("scenario: wavefront lo/hi need one entry per dimension");
    if (!(w.radius > 0.0 && w.cell > 0.0)) throw ArgumentError("scenario: wavefront radius and cell must be > 0");
    for (std::size_t i = 0; i < dimension; ++i)
      if (w.hi[i] < w.lo[i]) throw ArgumentError("scenario: wavefront box has hi < lo");
  }
  if (spacetime) {
    if (dimension != 1) throw ArgumentError("scenario: space-time probing needs dimension 1");
    if (!(spacetime->radius > 0.0 && spacetime->cell > 0.0))
      throw ArgumentError("scenario: spacetime radius and cell must be > 0");
    if (spacetime->rows.empty()) throw ArgumentError("scenario: spacetime rows are empty");
    if (!wavefront) throw ArgumentError("scenario: spacetime probing needs a wavefront block");
  }
  if (pseudo) {
    const auto& p = *pseudo;
    if (p.k_max < 1) throw ArgumentError("scenario: pseudo k_max must be >= 1");
    if (p.nodes != 8 && p.nodes != 16 && p.nodes != 24 && p.nodes != 32)
      throw ArgumentError("scenario: pseudo nodes must be 8, 16, 24 or 32");
    if (p.magnitudes.size() < 4) throw ArgumentError("scenario: pseudo needs at least 4 magnitudes");
    if (p.points.empty()) throw ArgumentError("scenario: pseudo needs test points");
    if (!(p.g_width > 0.0)) throw ArgumentError("scenario: pseudo g_width must be > 0");
  }
  for (const auto& e : expected_shifts)
    if (e.shift.size() != dimension) throw ArgumentError("scenario: expected shift has the wrong dimension");
  for (const auto& p : residual_points)
    if (p.size() != dimension + 1) throw ArgumentError("scenario: residual points are (t, x..)");
}

Scenario parse_scenario(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(origin, std::string("malformed JSON: ") + e.what());
  }
  Scenario s;
  try {
    check_keys(j,
               {"name", "description", "dimension", "mollifier", "eps", "coefficient", "data", "control", "times",
                "grid", "tolerances", "wavefront", "spacetime", "pseudo", "expected_shifts", "residual_points"},
               origin, "scenario");
    s.name = j.at("name").get<std::string>();
    s.description = get_or<std::string>(j, "description", "");
    s.dimension = j.at("dimension").get<std::size_t>();
    if (j.contains("mollifier")) {
      const auto& m = j.at("mollifier");
      check_keys(m, {"kind", "support_radius"}, origin, "mollifier");
      s.mollifier = get_or(m, "kind", s.mollifier);
      s.support_radius = get_or(m, "support_radius", s.support_radius);
    }
    if (j.contains("eps")) {
      const auto& e = j.at("eps");
      check_keys(e, {"k_min", "k_max"}, origin, "eps");
      s.eps_k_min = get_or(e, "k_min", s.eps_k_min);
      s.eps_k_max = get_or(e, "k_max", s.eps_k_max);
    }
    if (j.contains("coefficient")) {
      const auto& c = j.at("coefficient");
      check_keys(c, {"kind", "velocity", "at", "scale"}, origin, "coefficient");
      CoefficientSpec cs;
      cs.kind = c.at("kind").get<std::string>();
      cs.velocity = c.at("velocity").get<std::vector<double>>();
      cs.at = get_or(c, "at", cs.at);
      cs.scale = get_or(c, "scale", cs.scale);
      s.coefficient = cs;
    }
    if (j.contains("data")) s.data = parse_data(j.at("data"), origin, "data");
    if (j.contains("control")) s.control = parse_data(j.at("control"), origin, "control");
    s.times = get_or(j, "times", s.times);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      check_keys(g, {"lo", "hi", "n"}, origin, "grid");
      s.grid.lo = g.at("lo").get<std::vector<double>>();
      s.grid.hi = g.at("hi").get<std::vector<double>>();
      s.grid.n = g.at("n").get<std::vector<std::size_t>>();
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      check_keys(t, {"ode", "eikonal", "fio", "flow_limit", "vanishing"}, origin, "tolerances");
      s.tolerances.ode = get_or(t, "ode", s.tolerances.ode);
      s.tolerances.eikonal = get_or(t, "eikonal", s.tolerances.eikonal);
      s.tolerances.fio = get_or(t, "fio", s.tolerances.fio);
      s.tolerances.flow_limit = get_or(t, "flow_limit", s.tolerances.flow_limit);
      s.tolerances.vanishing = get_or(t, "vanishing", s.tolerances.vanishing);
    }
    if (j.contains("wavefront")) {
      const auto& w = j.at("wavefront");
      check_keys(w, {"radius", "cell", "lo", "hi"}, origin, "wavefront");
      WavefrontSpec ws;
      ws.radius = get_or(w, "radius", ws.radius);
      ws.cell = get_or(w, "cell", ws.cell);
      ws.lo = w.at("lo").get<std::vector<double>>();
      ws.hi = w.at("hi").get<std::vector<double>>();
      s.wavefront = ws;
    }
    if (j.contains("spacetime")) {
      const auto& st = j.at("spacetime");
      check_keys(st, {"radius", "cell", "rows", "columns", "exclusions"}, origin, "spacetime");
      SpacetimeSpec ss;
      ss.radius = get_or(st, "radius", ss.radius);
      ss.cell = get_or(st, "cell", ss.cell);
      ss.rows = intervals(st.at("rows"), origin);
      ss.columns = get_or(st, "columns", ss.columns);
      if (st.contains("exclusions")) ss.exclusions = intervals(st.at("exclusions"), origin);
      s.spacetime = ss;
    }
    if (j.contains("pseudo")) {
      const auto& p = j.at("pseudo");
      check_keys(p,
                 {"c_amplitude", "g_amplitude", "g_width", "kappa", "k_max", "nodes", "magnitudes", "points",
                  "eta_direction", "slope_step", "slope_tolerance"},
                 origin, "pseudo");
      PseudoSpec ps;
      ps.c_amplitude = get_or(p, "c_amplitude", ps.c_amplitude);
      ps.g_amplitude = get_or(p, "g_amplitude", ps.g_amplitude);
      ps.g_width = get_or(p, "g_width", ps.g_width);
      ps.kappa = get_or(p, "kappa", ps.kappa);
      ps.k_max = get_or(p, "k_max", ps.k_max);
      ps.nodes = get_or(p, "nodes", ps.nodes);
      ps.magnitudes = p.at("magnitudes").get<std::vector<double>>();
      for (const auto& pt : p.at("points")) {
        if (!pt.is_array() || pt.size() != 2) fail(origin, "pseudo points are [t, x] pairs");
        ps.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
      }
      ps.eta_direction = get_or(p, "eta_direction", ps.eta_direction);
      ps.slope_step = get_or(p, "slope_step", ps.slope_step);
      ps.slope_tolerance = get_or(p, "slope_tolerance", ps.slope_tolerance);
      s.pseudo = ps;
    }
    if (j.contains("expected_shifts"))
      for (const auto& e : j.at("expected_shifts")) {
        check_keys(e, {"t", "shift"}, origin, "expected_shifts entry");
        s.expected_shifts.push_back({e.at("t").get<double>(), e.at("shift").get<std::vector<double>>()});
      }
    s.residual_points = get_or(j, "residual_points", s.residual_points);
  } catch (const json::exception& e) {
    fail(origin, std::string("bad field: ") + e.what());
  }
  try {
    s.validate();
  } catch (const ArgumentError& e) {
    fail(origin, e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

std::string builtin_scenario_dir() {
  if (const char* env = std::getenv("GFIO_SCENARIO_DIR"); env && *env) return env;
  return GFIO_SCENARIO_DIR;
}

std::vector<ScenarioInfo> list_scenarios() {
  namespace fs = std::filesystem;
  std::vector<ScenarioInfo> out;
  const fs::path dir(builtin_scenario_dir());
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    try {
      const auto s = load_scenario(entry.path().string());
      out.push_back({s.name, s.description, entry.path().string()});
    } catch (const Error&) {
      continue;
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

Scenario resolve_scenario(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(name_or_path)) return load_scenario(name_or_path);
  for (const auto& info : list_scenarios())
    if (info.name == name_or_path) return load_scenario(info.path);
  throw ArgumentError("no scenario file or built-in named '" + name_or_path + "'");
}

Mollifier build_mollifier(const Scenario& s) {
  return make_mollifier(parse_mollifier_kind(s.mollifier), s.support_radius);
}

ParamFamily build_time_profile(const Scenario& s) {
  if (!s.coefficient) throw ArgumentError("scenario has no coefficient");
  const auto& c = *s.coefficient;
  const auto m = build_mollifier(s);
  const auto w = parse_scale_net(c.scale);
  if (c.kind == "heaviside") return embed_heaviside(m, w, c.at);
  if (c.kind == "delta") return embed_delta(m, w, c.at);
  if (c.kind == "smooth")
    return embed_smooth(
        1, [](std::span<const double> p) { return cplx(std::sin(p[0])); },
        [](std::span<const double> p, std::span<const int> a) {
          return cplx(std::sin(p[0] + 0.5 * kPi * static_cast<double>(a[0])));
        },
        "sin");
  return ParamFamily::constant(1, 1.0);
}

CoefficientSet build_coefficients(const Scenario& s) {
  const auto& c = *s.coefficient;
  const auto k = build_time_profile(s);
  CoefficientSet cs;
  cs.n = s.dimension;
  for (std::size_t j = 0; j < s.dimension; ++j) {
    if (c.velocity[j] == 0.0)
      cs.a1.push_back(ParamFamily::zero(s.dimension + 1));
    else
      cs.a1.push_back(lift_time_only(cplx(-c.velocity[j]) * k, s.dimension));
  }
  if (c.kind == "heaviside" || c.kind == "delta") {
    const auto w = parse_scale_net(c.scale);
    const double r = s.support_radius;
    cs.feature_width = [w, r](double e) { return w(e) * r; };
  }
  return cs;
}

ParamFamily build_data(const Scenario& s, const DataSpec& d) {
  const auto m = build_mollifier(s);
  const auto w = parse_scale_net(d.scale);
  if (d.kind == "gaussian") return gaussian_family(d.center, d.width);
  if (d.kind == "delta") return embed_delta(m, w, d.center[0]);
  if (d.kind == "heaviside") return embed_heaviside(m, w, d.center[0]);
  const double len = std::hypot(d.direction[0], d.direction[1]);
  const std::array<double, 2> dir{d.direction[0] / len, d.direction[1] / len};
  const double reach = d.cutoff_outer + 10.0;
  auto curve = PlanarCurve::line({d.center[0], d.center[1]}, dir, -reach, reach);
  return embed_curve_delta(m, w, curve, plateau_cutoff(d.center, d.cutoff_inner, d.cutoff_outer));
}

double closed_form_shift(const Scenario& s, double eps, double t) {
  if (!s.coefficient) throw ArgumentError("scenario has no coefficient");
  const auto& c = *s.coefficient;
  if (c.kind == "constant") return t;
  if (c.kind == "smooth") return 1.0 - std::cos(t);
  const auto m = build_mollifier(s);
  const double w = parse_scale_net(c.scale)(eps);
  const double omega = w * s.support_radius;
  if (c.kind == "delta") return m.cdf((t - c.at) / w) - m.cdf(-c.at / w);
  // Λ_ε(t) = ∫_0^t H_ε(σ - at) dσ: zero before the layer, t - at after it, quadrature inside.
  // The integrand is smooth on the layer, so one fixed high-order rule suffices.
  if (c.at - omega < 0.0) throw ArgumentError("closed_form_shift: the jump layer must start after t = 0");
  if (t <= c.at - omega) return 0.0;
  if (t >= c.at + omega) return t - c.at;
  auto h = [&](double sig) { return m.cdf((sig - c.at) / w); };
  return boost::math::quadrature::gauss<double, 30>::integrate(h, c.at - omega, t);
}

}  // namespace gfio
