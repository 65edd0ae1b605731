#pragma once

// Scenario configuration files (JSON) and the builders that turn them into coefficient and data nets.

#include <optional>
#include <string>
#include <vector>

#include "gfio/characteristics.hpp"
#include "gfio/grid.hpp"
#include "gfio/microlocal.hpp"
#include "gfio/regularization.hpp"

namespace gfio {

/// Principal coefficient a1 = -v·k_ε(t) with k a regularized Heaviside or delta in t, sin t, or 1.
struct CoefficientSpec {
  std::string kind;  // heaviside | delta | smooth | constant
  std::vector<double> velocity;
  double at = 1.0;                 // jump / mass location in t
  std::string scale = "slow-scale";
};

struct DataSpec {
  std::string kind;  // delta | curve-delta | gaussian | heaviside
  std::vector<double> center;
  double width = 0.1;              // gaussian width
  std::string scale = "identity";  // mollification width of singular data
  std::vector<double> direction;   // curve-delta: line direction
  double cutoff_inner = 1.0;       // curve-delta: plateau cutoff radii
  double cutoff_outer = 1.5;
};

/// Probe lattice for the initial wave front set; at later times the box is carried by the limit flow.
struct WavefrontSpec {
  double radius = 0.25;
  double cell = 0.25;
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Space-time probes in (t, x): rows are the multiples of `cell` inside each time range;
/// columns are the predicted position ± `columns` cells.
struct SpacetimeSpec {
  double radius = 0.125;
  double cell = 0.125;
  std::vector<Interval> rows;
  int columns = 2;
  std::vector<Interval> exclusions;
};

/// Symbol hierarchy test: a1 = c(t)⟨η⟩ with c = 1 + c_amplitude·sin t, a0 = g(x)⟨η⟩^{iκ}
/// with g = g_amplitude·exp(-x²/g_width²).
struct PseudoSpec {
  double c_amplitude = 0.5;
  double g_amplitude = 0.5;
  double g_width = 1.0;
  double kappa = 1.0;
  int k_max = 2;
  int nodes = 16;
  std::vector<double> magnitudes;
  std::vector<std::pair<double, double>> points;  // (t, x)
  double eta_direction = 1.0;
  double slope_step = 1.0;
  double slope_tolerance = 0.3;
};

struct ExpectedShift {
  double t;
  std::vector<double> shift;
};

struct Tolerances {
  double ode = 1e-9;
  double eikonal = 1e-6;
  double fio = 1e-5;
  double flow_limit = 1e-3;
  double vanishing = 1e-10;
};

struct Scenario {
  std::string name;
  std::string description;
  std::size_t dimension = 1;
  std::string mollifier = "polynomial-bump";
  double support_radius = 1.0;
  int eps_k_min = 2;
  int eps_k_max = 16;
  std::optional<CoefficientSpec> coefficient;
  std::optional<DataSpec> data;
  std::optional<DataSpec> control;
  std::vector<double> times;
  UniformGrid grid;
  Tolerances tolerances;
  std::optional<WavefrontSpec> wavefront;
  std::optional<SpacetimeSpec> spacetime;
  std::optional<PseudoSpec> pseudo;
  std::vector<ExpectedShift> expected_shifts;
  std::vector<std::vector<double>> residual_points;  // (t, x..) for the eikonal residual

  std::vector<double> eps() const;
  /// Raises ArgumentError describing the first violated constraint.
  void validate() const;
};

Scenario parse_scenario(const std::string& json_text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);

/// Directory holding the shipped scenario files.
std::string builtin_scenario_dir();
struct ScenarioInfo {
  std::string name;
  std::string description;
  std::string path;
};
/// Sorted by name.
std::vector<ScenarioInfo> list_scenarios();
/// A path to a scenario file or the name of a built-in.
Scenario resolve_scenario(const std::string& name_or_path);

Mollifier build_mollifier(const Scenario& s);
CoefficientSet build_coefficients(const Scenario& s);
ParamFamily build_data(const Scenario& s, const DataSpec& d);
/// Scalar time profile k_ε(t) of the principal coefficient.
ParamFamily build_time_profile(const Scenario& s);

/// Λ_ε(t) = ∫_0^t k_ε(s) ds in closed form (Gauss–Legendre on the jump layer); the flow foot is x - v·Λ_ε(t).
double closed_form_shift(const Scenario& s, double eps, double t);

}  // namespace gfio
