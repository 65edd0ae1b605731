#pragma once

// Scenario pipeline: regularize → characteristics → fio → microlocal → compare, with CSV
// artifacts and a machine-readable pass/fail report.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gfio/characteristics.hpp"
#include "gfio/microlocal.hpp"
#include "gfio/scenario.hpp"

namespace gfio {

/// Raised by run_scenario; names the failing stage and, when known, the ε value.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what, std::optional<double> eps = {});
  const std::string& stage() const { return stage_; }
  std::optional<double> eps() const { return eps_; }

 private:
  std::string stage_;
  std::optional<double> eps_;
};

struct Check {
  std::string stage;
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct Report {
  std::string scenario;
  std::vector<Check> checks;
  std::vector<std::string> artifacts;
  double seconds = 0.0;

  bool passed() const;
  const Check* find(const std::string& name) const;
};

struct RunOptions {
  std::string out_dir;  // empty: no artifacts
  std::optional<double> eps_min;
  std::optional<double> eps_max;
  std::optional<std::size_t> grid;
  std::optional<double> tolerance;
  int jobs = 1;
};

/// Applies --eps-min/--eps-max/--grid/--tolerance; the result is validated.
Scenario apply_overrides(Scenario s, const RunOptions& opt);

Report run_scenario(const Scenario& s, const RunOptions& opt = {});

void write_report_json(std::ostream& os, const Report& r);

/// u_ε(t, ·) sampled through the characteristic representation b·u0(γ(x,t,0)).
FieldSource solution_field(const PhaseAmp& p, std::shared_ptr<const CharFlow> flow, const ParamFamily& u0, double t);

/// u_ε on (t, x) boxes for one space dimension; the foot is traced once per time row.
FieldSource spacetime_field(const PhaseAmp& p, std::shared_ptr<const CharFlow> flow, const ParamFamily& u0);

/// Multiples of `cell` inside [lo, hi] per axis (row-major).
std::vector<std::vector<double>> lattice(const std::vector<double>& lo, const std::vector<double>& hi, double cell);

}  // namespace gfio
