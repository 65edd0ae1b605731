#pragma once

// Numerical wave front sets: windowed directional Fourier decay over an ε-subgrid, the
// Hamiltonian flow χ_t and its ε → 0 limit, and comparison against propagation predictions.

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "gfio/characteristics.hpp"
#include "gfio/common.hpp"
#include "gfio/regularization.hpp"

namespace gfio {

/// Samples u_ε on the box lo + h·j, j ∈ [0, n) per axis (row-major, last axis fastest).
using FieldSource = std::function<std::vector<cplx>(double eps, const std::vector<double>& lo, double h,
                                                    const std::vector<std::size_t>& n)>;

FieldSource field_from_family(const ParamFamily& u);

enum class Verdict { Regular, Singular, Borderline };
std::string to_string(Verdict v);

inline constexpr double kDefaultHalfAngle = 15.0 * kPi / 180.0;

/// Window, cone and thresholds of one probe. The window is a Gaussian of width σ = R/8
/// truncated at radius R; the tested band is [ξ_max/2, ξ_max] with ξ_max = 9/σ.
struct WFProbe {
  std::vector<double> center;
  double radius = 0.25;
  std::vector<double> direction;  // unit vector
  double half_angle = kDefaultHalfAngle;
  int l_max = 5;
  double n_max = 10.0;
  std::vector<double> eps_subgrid;

  void validate() const;
  double sigma() const { return radius / 8.0; }
  double xi_max() const { return 9.0 / sigma(); }
  double window(const std::vector<double>& x) const;
};

/// The two largest grid values with ε·ξ_max ≤ 1.
std::vector<double> default_eps_subgrid(const std::vector<double>& grid, double xi_max);

/// min(π / (2 ξ_max), ε / 3)
double sampling_step(double xi_max, double eps);

struct DecayResult {
  std::vector<double> eps;
  std::vector<double> decay_rate;  // fitted l*(ε); +inf when the tail is below the noise floor
  std::vector<double> fit_r2;
  double uniformity = 0.0;         // ε-exponent of sup ⟨ξ⟩^{l_max} |F| over the band
  Verdict verdict = Verdict::Regular;

  double min_decay() const;
};

DecayResult directional_decay(const FieldSource& u, const WFProbe& probe);
DecayResult directional_decay(const ParamFamily& u, const WFProbe& probe);

struct WFRecord {
  std::vector<double> position;
  std::vector<double> direction;
  double decay_rate = 0.0;
  double uniformity = 0.0;
  Verdict verdict = Verdict::Regular;
};

struct WFEstimate {
  std::vector<WFRecord> records;
  std::vector<WFRecord> singular() const;
};

/// ±1 in one dimension, 16 angles k·22.5° in two.
std::vector<std::vector<double>> default_directions(std::size_t dim);

/// Probes every (center, direction); one windowed FFT per (center, ε) serves all directions.
WFEstimate estimate_wavefront(const FieldSource& u, const std::vector<std::vector<double>>& centers,
                              const std::vector<std::vector<double>>& directions, const WFProbe& probe_template);
WFEstimate estimate_wavefront(const ParamFamily& u, const std::vector<std::vector<double>>& centers,
                              const std::vector<std::vector<double>>& directions, const WFProbe& probe_template);

/// χ_{t,ε}(x, ξ) = (γ_ε(x,t,0), (∂γ_ε/∂x)^{-T} ξ) and its limit over the ε tail.
class FlowMap {
 public:
  using PhasePoint = std::pair<std::vector<double>, std::vector<double>>;

  FlowMap(std::shared_ptr<const CharFlow> flow, double t, std::vector<double> eps);

  PhasePoint chi(double eps, const std::vector<double>& x, const std::vector<double>& xi) const;
  /// Through the time-reversed flow: x = γ_ε(y, 0, t), ξ = (∂γ_ε/∂x)(x)^T η.
  PhasePoint chi_inverse(double eps, const std::vector<double>& y, const std::vector<double>& eta) const;

  /// Cauchy test over the ε tail on the sample set; the limit is evaluated at the smallest ε.
  void fit_limit(const std::vector<std::vector<double>>& xs, const std::vector<std::vector<double>>& xis,
                 double threshold = 1e-3);
  bool has_limit() const { return has_limit_; }
  double cauchy_gap() const { return gap_; }
  PhasePoint chi_limit(const std::vector<double>& x, const std::vector<double>& xi) const;
  PhasePoint chi_limit_inverse(const std::vector<double>& y, const std::vector<double>& eta) const;

  /// max |χ_ε^{-1}(χ_ε(x, ξ)) - (x, ξ)| over the samples and all ε.
  double bijectivity_error(const std::vector<std::vector<double>>& xs,
                           const std::vector<std::vector<double>>& xis) const;

  double time() const { return t_; }
  const std::vector<double>& eps() const { return eps_; }

 private:
  std::shared_ptr<const CharFlow> flow_;
  double t_;
  std::vector<double> eps_;
  bool has_limit_ = false;
  double gap_ = std::numeric_limits<double>::infinity();
};

/// Raises when the Jacobian is singular at a sample point.
FlowMap hamiltonian_flow(std::shared_ptr<const CharFlow> flow, double t, const std::vector<double>& eps,
                         const std::vector<std::vector<double>>& sample_x, double threshold = 1e-3);

/// Image of the Singular records of wf0 under χ_t^{-1}; directions are normalized.
std::vector<WFRecord> predict_wavefront(const FlowMap& fm, const WFEstimate& wf0);

struct Interval {
  double lo;
  double hi;
};

/// Limit phase φ(t, x, η) on ℝ × ℝ^n × ℝ^n.
using LimitPhase = std::function<double(double t, const std::vector<double>& x, const std::vector<double>& eta)>;

/// {(t, x, ∇_tφ, ∇_xφ) : (∇_ηφ(t,x,η), η) ∈ wf0} at the given times. Records live in (t, x) space
/// with normalized covectors; x solves ∇_ηφ = x0 by Newton's method. Times inside an exclusion
/// interval raise ArgumentError.
std::vector<WFRecord> spacetime_wf_bound(const LimitPhase& phi, const std::vector<WFRecord>& wf0,
                                         const std::vector<double>& times, const std::vector<Interval>& exclusions);

struct WFComparison {
  std::vector<std::pair<WFRecord, WFRecord>> matches;  // (predicted, nearest estimated)
  std::vector<WFRecord> misses;
  std::vector<WFRecord> spurious;
  bool ok() const { return misses.empty() && spurious.empty(); }
};

/// A predicted record is matched when some estimated record lies within pos_tol (Euclidean) and
/// ang_tol (radians); estimated records near no prediction are spurious.
WFComparison compare_wf(const std::vector<WFRecord>& estimated, const std::vector<WFRecord>& predicted, double pos_tol,
                        double ang_tol);

double direction_angle(const std::vector<double>& a, const std::vector<double>& b);

/// Rows: position.., direction.., decay_rate, uniformity, verdict
void write_csv(std::ostream& os, const WFEstimate& wf);
/// Rows: status, predicted position/direction, estimated position/direction
void write_csv(std::ostream& os, const WFComparison& cmp);

}  // namespace gfio
