#pragma once

// Embedded Dormand–Prince 5(4) integrator with step-size control, forward or backward in s.

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace gfio {

using OdeRhs = std::function<void(double s, const std::vector<double>& y, std::vector<double>& dy)>;

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-9;
  double h_init = 0.0;  // 0 picks |s1 - s0| / 100
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 1000000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

/// Raised when the step size collapses below round-off of s; carries the abscissa reached.
struct StepUnderflow {
  double s;
};

/// Integrates y from s0 to s1 in place. Throws StepUnderflow when the step collapses.
OdeStats integrate_dopri(const OdeRhs& f, double s0, double s1, std::vector<double>& y, const OdeOptions& opt = {});

}  // namespace gfio
