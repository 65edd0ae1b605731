#pragma once

// Embedding of singular coefficients and data into ε-parametrized nets of smooth functions.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfio/common.hpp"

namespace gfio {

enum class MollifierKind { polynomial_bump, smoothed_cosine };

MollifierKind parse_mollifier_kind(const std::string& name);
std::string to_string(MollifierKind kind);

/// Nonnegative, symmetric bump supported in [-R, R] with unit mass.
///
/// The unit profile p(u) on [-1, 1] is normalized by Gauss–Legendre quadrature, so
/// ρ(z) = c p(z / R) / R with c = 1 / ∫p.
class Mollifier {
 public:
  /// Custom unit profile: profile(u, k) returns the k-th derivative of p at u ∈ [-1, 1].
  using Profile = std::function<double(double u, int order)>;

  Mollifier(MollifierKind kind, double support_radius);
  Mollifier(Profile profile, double support_radius, std::string label);

  double operator()(double z) const { return derivative(z, 0); }
  double derivative(double z, int order) const;
  /// ∫_{-∞}^{z} ρ. Symmetric reflection makes cdf(0) == 0.5 exactly.
  double cdf(double z) const;

  double support_radius() const { return radius_; }
  double normalization() const { return norm_; }
  const std::string& label() const { return label_; }
  /// Moments ∫ z^k ρ(z) dz for k = 0..4.
  const std::array<double, 5>& moments() const { return moments_; }

 private:
  void normalize();

  Profile profile_;
  double radius_;
  double norm_ = 1.0;
  std::string label_;
  std::array<double, 5> moments_{};
};

/// make_mollifier: polynomial bump c(1-z²)^4 or smoothed cosine c·cos²(πz/2), dilated to the radius.
Mollifier make_mollifier(MollifierKind kind, double support_radius = 1.0);

enum class ScaleClass { identity, slow_scale, custom };

/// Positive ε ↦ width rule used as mollification scale.
class ScaleNet {
 public:
  ScaleNet(std::function<double(double)> rule, ScaleClass declared, std::string name);

  /// w(ε) = ε
  static ScaleNet identity();
  /// w(ε) = 1 / (1 + log(1/ε)); the reciprocal is a slow scale net and 0 < w < 1 on (0, 1).
  static ScaleNet slow_scale();
  /// w(ε) = c ε^p
  static ScaleNet power(double c, double p);

  double operator()(double eps) const;
  ScaleClass declared_class() const { return declared_; }
  const std::string& name() const { return name_; }

 private:
  std::function<double(double)> rule_;
  ScaleClass declared_;
  std::string name_;
};

ScaleNet parse_scale_net(const std::string& name);

/// Axis-aligned box; an empty box means "unbounded".
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  bool empty() const { return lo.empty(); }
  bool contains(std::span<const double> p, double slack = 0.0) const;
};

/// Representative net (u_ε)_ε: an ε-indexed family of smooth functions on ℝ^d.
///
/// Values are complex; real families have zero imaginary part. When no analytic
/// derivative is supplied, derivatives come from Richardson-extrapolated central
/// differences.
class ParamFamily {
 public:
  using EvalFn = std::function<cplx(double eps, std::span<const double> p)>;
  using DerivFn =
      std::function<cplx(double eps, std::span<const double> p, std::span<const int> alpha)>;

  ParamFamily() = default;
  ParamFamily(std::size_t dim, EvalFn eval, DerivFn deriv = {}, std::string label = {});

  cplx operator()(double eps, std::span<const double> p) const { return eval_(eps, p); }
  cplx operator()(double eps, double x) const { return eval_(eps, std::span<const double>(&x, 1)); }
  cplx derivative(double eps, std::span<const double> p, std::span<const int> alpha) const;
  /// Central-difference derivative, independent of any analytic closure.
  cplx fd_derivative(double eps, std::span<const double> p, std::span<const int> alpha,
                     double h = 1e-3) const;

  std::size_t dimension() const { return dim_; }
  const std::string& label() const { return label_; }
  bool valid() const { return static_cast<bool>(eval_); }
  bool has_analytic_derivative() const { return static_cast<bool>(deriv_); }

  /// Declared domain; points outside are not evaluable.
  const Box& domain() const { return domain_; }
  ParamFamily& with_domain(Box box);

  /// Declared growth class (free-form, e.g. "moderate(1)"), informational.
  const std::string& declared_growth() const { return growth_; }
  ParamFamily& with_declared_growth(std::string g);

  /// Marks the family as identically zero (lets solvers skip work).
  bool is_zero() const { return zero_; }
  /// Marks a family that depends on time only (first coordinate) when used as a (t, x) coefficient.
  bool time_only() const { return time_only_; }

  static ParamFamily zero(std::size_t dim);
  static ParamFamily constant(std::size_t dim, cplx value);

  friend ParamFamily operator+(const ParamFamily& a, const ParamFamily& b);
  friend ParamFamily operator*(cplx c, const ParamFamily& a);
  /// Pointwise product (derivatives via the Leibniz rule).
  friend ParamFamily product(const ParamFamily& a, const ParamFamily& b);

 private:
  friend ParamFamily lift_time_only(const ParamFamily& f1d, std::size_t n);

  std::size_t dim_ = 0;
  EvalFn eval_;
  DerivFn deriv_;
  std::string label_;
  std::string growth_;
  Box domain_;
  bool zero_ = false;
  bool time_only_ = false;
};

/// H_ε(t) = ∫_{-∞}^{(t - jump_at)/w(ε)} ρ(z) dz.
ParamFamily embed_heaviside(const Mollifier& m, const ScaleNet& w, double jump_at);

/// ρ_ε(x) = ρ((x - at)/w(ε)) / w(ε).
ParamFamily embed_delta(const Mollifier& m, const ScaleNet& w, double at);

/// Regular planar curve s ↦ C(s) on [s_min, s_max].
struct PlanarCurve {
  std::function<std::array<double, 2>(double)> point;
  std::function<std::array<double, 2>(double)> tangent;
  std::function<std::array<double, 2>(double)> second;
  double s_min = 0.0;
  double s_max = 1.0;
  bool closed = false;
  /// Optional starting guess for the projection; coarse sampling otherwise.
  std::function<double(std::array<double, 2>)> guess;

  static PlanarCurve line(std::array<double, 2> origin, std::array<double, 2> direction,
                          double s_min, double s_max);
  static PlanarCurve circle(std::array<double, 2> center, double radius);
};

struct CurveProjection {
  double s = 0.0;
  std::array<double, 2> foot{};
  std::array<double, 2> normal{};  // unit left normal at the foot point
  double signed_distance = 0.0;
  bool unique = false;             // orthogonal foot inside the parameter range and tube
};

/// Nearest-point projection by Newton iteration on (C(s) - x)·C'(s) = 0 (tolerance 1e-12).
CurveProjection project_onto_curve(const PlanarCurve& curve, std::array<double, 2> x);

/// (ψ δ_C)_ε(x) = ψ(x) ρ(d(x)/w(ε)) / w(ε), d the signed distance to C.
ParamFamily embed_curve_delta(const Mollifier& m, const ScaleNet& w, PlanarCurve curve,
                              ParamFamily cutoff);

/// Constant-in-ε net from a smooth function and (optionally) its derivatives.
ParamFamily embed_smooth(std::size_t dim, std::function<cplx(std::span<const double>)> f,
                         std::function<cplx(std::span<const double>, std::span<const int>)> df = {},
                         std::string label = "smooth");

/// exp(-|x - c|² / (2 s²)) scaled by amplitude, with analytic derivatives.
ParamFamily gaussian_family(std::vector<double> center, double width, cplx amplitude = 1.0);

/// Smooth compactly supported cutoff: product over axes of a C^∞ plateau that equals 1 on
/// [c - inner, c + inner] and vanishes outside [c - outer, c + outer].
ParamFamily plateau_cutoff(std::vector<double> center, double inner, double outer);

/// Lift a family of one variable t to a (t, x_1..x_n) coefficient that ignores x.
ParamFamily lift_time_only(const ParamFamily& f1d, std::size_t n);

}  // namespace gfio
