#include "gfio/regularization.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numeric>

namespace gfio {

namespace {

using boost::math::quadrature::gauss;

// (1 - u²)^4 = 1 - 4u² + 6u⁴ - 4u⁶ + u⁸
constexpr std::array<double, 9> kBumpCoeffs{1, 0, -4, 0, 6, 0, -4, 0, 1};

double bump_profile(double u, int order) {
  if (std::abs(u) > 1.0) return 0.0;
  double acc = 0.0;
  for (int j = static_cast<int>(kBumpCoeffs.size()) - 1; j >= order; --j) {
    double c = kBumpCoeffs[j];
    if (c == 0.0) continue;
    for (int r = 0; r < order; ++r) c *= (j - r);
    acc += c * std::pow(u, j - order);
  }
  return acc;
}

double cosine_profile(double u, int order) {
  if (std::abs(u) > 1.0) return 0.0;
  if (order == 0) return 0.5 * (1.0 + std::cos(kPi * u));
  return 0.5 * std::pow(kPi, order) * std::cos(kPi * u + 0.5 * kPi * order);
}

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

double hermite_prob(int n, double u) {
  double h0 = 1.0;
  if (n == 0) return h0;
  double h1 = u;
  for (int k = 1; k < n; ++k) {
    const double h2 = u * h1 - k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

MollifierKind parse_mollifier_kind(const std::string& name) {
  if (name == "polynomial-bump") return MollifierKind::polynomial_bump;
  if (name == "smoothed-cosine") return MollifierKind::smoothed_cosine;
  throw ArgumentError("unknown mollifier kind '" + name + "'");
}

std::string to_string(MollifierKind kind) {
  return kind == MollifierKind::polynomial_bump ? "polynomial-bump" : "smoothed-cosine";
}

Mollifier::Mollifier(MollifierKind kind, double support_radius)
    : radius_(support_radius), label_(to_string(kind)) {
  if (!(support_radius > 0.0)) throw ArgumentError("mollifier: support_radius must be > 0");
  profile_ = kind == MollifierKind::polynomial_bump ? Profile(bump_profile) : Profile(cosine_profile);
  normalize();
}

Mollifier::Mollifier(Profile profile, double support_radius, std::string label)
    : profile_(std::move(profile)), radius_(support_radius), label_(std::move(label)) {
  if (!(support_radius > 0.0)) throw ArgumentError("mollifier: support_radius must be > 0");
  for (int i = 0; i <= 64; ++i) {
    const double u = -1.0 + i / 32.0;
    const double a = profile_(u, 0);
    if (a < 0.0) throw ArgumentError("mollifier: profile must be nonnegative");
    if (std::abs(a - profile_(-u, 0)) > 1e-12 * (1.0 + std::abs(a)))
      throw ArgumentError("mollifier: profile must be symmetric");
  }
  normalize();
}

void Mollifier::normalize() {
  const double mass = gauss<double, 30>::integrate([&](double u) { return profile_(u, 0); }, -1.0, 1.0);
  if (!(mass >= 1e-12)) throw ArgumentError("mollifier: profile is not normalizable (integral below 1e-12)");
  norm_ = 1.0 / mass;
  for (int k = 0; k < 5; ++k) {
    const double mk = gauss<double, 30>::integrate(
        [&](double u) { return std::pow(u, k) * profile_(u, 0); }, -1.0, 1.0);
    moments_[k] = norm_ * std::pow(radius_, k) * mk;
  }
}

double Mollifier::derivative(double z, int order) const {
  const double u = z / radius_;
  if (std::abs(u) > 1.0) return 0.0;
  return norm_ * profile_(u, order) / std::pow(radius_, order + 1);
}

double Mollifier::cdf(double z) const {
  const double u = z / radius_;
  if (u <= -1.0) return 0.0;
  if (u >= 1.0) return 1.0;
  if (u == 0.0) return 0.5;
  if (u > 0.0) return 1.0 - cdf(-z);
  return norm_ * gauss<double, 30>::integrate([&](double v) { return profile_(v, 0); }, -1.0, u);
}

Mollifier make_mollifier(MollifierKind kind, double support_radius) {
  return Mollifier(kind, support_radius);
}

ScaleNet::ScaleNet(std::function<double(double)> rule, ScaleClass declared, std::string name)
    : rule_(std::move(rule)), declared_(declared), name_(std::move(name)) {}

ScaleNet ScaleNet::identity() {
  return ScaleNet([](double e) { return e; }, ScaleClass::identity, "identity");
}

ScaleNet ScaleNet::slow_scale() {
  return ScaleNet([](double e) { return 1.0 / (1.0 + std::log(1.0 / e)); }, ScaleClass::slow_scale,
                  "slow-scale");
}

ScaleNet ScaleNet::power(double c, double p) {
  return ScaleNet([c, p](double e) { return c * std::pow(e, p); }, ScaleClass::custom,
                  "power(" + std::to_string(c) + "," + std::to_string(p) + ")");
}

double ScaleNet::operator()(double eps) const {
  if (!(eps > 0.0 && eps <= 1.0)) throw ArgumentError("scale net: eps must lie in (0, 1]");
  const double w = rule_(eps);
  if (!(w > 0.0) || !std::isfinite(w)) throw ArgumentError("scale net '" + name_ + "' must be positive");
  return w;
}

ScaleNet parse_scale_net(const std::string& name) {
  if (name == "identity") return ScaleNet::identity();
  if (name == "slow-scale") return ScaleNet::slow_scale();
  throw ArgumentError("unknown scale net '" + name + "'");
}

bool Box::contains(std::span<const double> p, double slack) const {
  if (empty()) return true;
  for (std::size_t i = 0; i < lo.size() && i < p.size(); ++i)
    if (p[i] < lo[i] - slack || p[i] > hi[i] + slack) return false;
  return true;
}

ParamFamily::ParamFamily(std::size_t dim, EvalFn eval, DerivFn deriv, std::string label)
    : dim_(dim), eval_(std::move(eval)), deriv_(std::move(deriv)), label_(std::move(label)) {}

ParamFamily& ParamFamily::with_domain(Box box) {
  domain_ = std::move(box);
  return *this;
}

ParamFamily& ParamFamily::with_declared_growth(std::string g) {
  growth_ = std::move(g);
  return *this;
}

cplx ParamFamily::derivative(double eps, std::span<const double> p, std::span<const int> alpha) const {
  if (alpha.size() != dim_) throw ArgumentError("derivative: multi-index has wrong length");
  if (std::all_of(alpha.begin(), alpha.end(), [](int a) { return a == 0; })) return eval_(eps, p);
  if (zero_) return 0.0;
  if (deriv_) return deriv_(eps, p, alpha);
  return fd_derivative(eps, p, alpha);
}

cplx ParamFamily::fd_derivative(double eps, std::span<const double> p, std::span<const int> alpha,
                                double h) const {
  std::vector<int> a(alpha.begin(), alpha.end());
  auto it = std::find_if(a.begin(), a.end(), [](int v) { return v > 0; });
  if (it == a.end()) return eval_(eps, p);
  const std::size_t i = static_cast<std::size_t>(it - a.begin());
  --a[i];
  std::vector<double> q(p.begin(), p.end());
  auto lower = [&](double step) {
    q[i] = p[i] + step;
    const cplx fp = fd_derivative(eps, q, a, h);
    q[i] = p[i] - step;
    const cplx fm = fd_derivative(eps, q, a, h);
    q[i] = p[i];
    return (fp - fm) / (2.0 * step);
  };
  // Richardson: error O(h^4)
  return (4.0 * lower(0.5 * h) - lower(h)) / 3.0;
}

ParamFamily ParamFamily::zero(std::size_t dim) {
  ParamFamily f(dim, [](double, std::span<const double>) { return cplx(0.0); },
                [](double, std::span<const double>, std::span<const int>) { return cplx(0.0); }, "zero");
  f.zero_ = true;
  f.time_only_ = true;
  return f;
}

ParamFamily ParamFamily::constant(std::size_t dim, cplx value) {
  if (value == cplx(0.0)) return zero(dim);
  ParamFamily f(dim, [value](double, std::span<const double>) { return value; },
                [](double, std::span<const double>, std::span<const int>) { return cplx(0.0); },
                "constant");
  f.time_only_ = true;
  return f;
}

ParamFamily operator+(const ParamFamily& a, const ParamFamily& b) {
  if (a.dim_ != b.dim_) throw ArgumentError("ParamFamily sum: dimension mismatch");
  ParamFamily::DerivFn d;
  if (a.deriv_ && b.deriv_)
    d = [da = a.deriv_, db = b.deriv_](double e, std::span<const double> p, std::span<const int> al) {
      return da(e, p, al) + db(e, p, al);
    };
  ParamFamily f(a.dim_,
                [ea = a.eval_, eb = b.eval_](double e, std::span<const double> p) { return ea(e, p) + eb(e, p); },
                d, a.label_ + "+" + b.label_);
  f.zero_ = a.zero_ && b.zero_;
  f.time_only_ = a.time_only_ && b.time_only_;
  f.domain_ = a.domain_.empty() ? b.domain_ : a.domain_;
  return f;
}

ParamFamily operator*(cplx c, const ParamFamily& a) {
  ParamFamily::DerivFn d;
  if (a.deriv_)
    d = [c, da = a.deriv_](double e, std::span<const double> p, std::span<const int> al) {
      return c * da(e, p, al);
    };
  ParamFamily f(a.dim_, [c, ea = a.eval_](double e, std::span<const double> p) { return c * ea(e, p); }, d,
                a.label_);
  f.zero_ = a.zero_ || c == cplx(0.0);
  f.time_only_ = a.time_only_;
  f.domain_ = a.domain_;
  f.growth_ = a.growth_;
  return f;
}

ParamFamily product(const ParamFamily& a, const ParamFamily& b) {
  if (a.dim_ != b.dim_) throw ArgumentError("ParamFamily product: dimension mismatch");
  const std::size_t dim = a.dim_;
  auto deriv = [a, b, dim](double e, std::span<const double> p, std::span<const int> alpha) {
    // Leibniz rule over all β ≤ α.
    std::vector<int> beta(dim, 0), rest(dim);
    cplx acc = 0.0;
    while (true) {
      double coeff = 1.0;
      for (std::size_t i = 0; i < dim; ++i) {
        rest[i] = alpha[i] - beta[i];
        coeff *= binomial(alpha[i], beta[i]);
      }
      acc += coeff * a.derivative(e, p, beta) * b.derivative(e, p, rest);
      std::size_t i = 0;
      for (; i < dim; ++i) {
        if (beta[i] < alpha[i]) {
          ++beta[i];
          break;
        }
        beta[i] = 0;
      }
      if (i == dim) break;
    }
    return acc;
  };
  ParamFamily f(dim, [ea = a.eval_, eb = b.eval_](double e, std::span<const double> p) { return ea(e, p) * eb(e, p); },
                deriv, a.label_ + "*" + b.label_);
  f.zero_ = a.zero_ || b.zero_;
  f.time_only_ = a.time_only_ && b.time_only_;
  return f;
}

ParamFamily lift_time_only(const ParamFamily& f1d, std::size_t n) {
  if (f1d.dimension() != 1) throw ArgumentError("lift_time_only: expects a family of one variable");
  ParamFamily f(
      n + 1, [f1d](double e, std::span<const double> p) { return f1d(e, p[0]); },
      [f1d](double e, std::span<const double> p, std::span<const int> alpha) {
        for (std::size_t i = 1; i < alpha.size(); ++i)
          if (alpha[i] != 0) return cplx(0.0);
        const int a0 = alpha[0];
        return f1d.derivative(e, p.first(1), std::span<const int>(&a0, 1));
      },
      f1d.label());
  f.zero_ = f1d.is_zero();
  f.time_only_ = true;
  return f;
}

ParamFamily embed_heaviside(const Mollifier& m, const ScaleNet& w, double jump_at) {
  return ParamFamily(
             1,
             [m, w, jump_at](double e, std::span<const double> p) {
               return cplx(m.cdf((p[0] - jump_at) / w(e)));
             },
             [m, w, jump_at](double e, std::span<const double> p, std::span<const int> alpha) {
               const double we = w(e);
               const int k = alpha[0];
               return cplx(m.derivative((p[0] - jump_at) / we, k - 1) / std::pow(we, k));
             },
             "heaviside")
      .with_declared_growth("log-type derivatives (slow-scale width)");
}

ParamFamily embed_delta(const Mollifier& m, const ScaleNet& w, double at) {
  return ParamFamily(
             1,
             [m, w, at](double e, std::span<const double> p) {
               const double we = w(e);
               return cplx(m((p[0] - at) / we) / we);
             },
             [m, w, at](double e, std::span<const double> p, std::span<const int> alpha) {
               const double we = w(e);
               const int k = alpha[0];
               return cplx(m.derivative((p[0] - at) / we, k) / std::pow(we, k + 1));
             },
             "delta")
      .with_declared_growth("moderate(1)");
}

PlanarCurve PlanarCurve::line(std::array<double, 2> origin, std::array<double, 2> direction, double s_min,
                              double s_max) {
  const double len2 = direction[0] * direction[0] + direction[1] * direction[1];
  if (!(len2 > 0.0)) throw ArgumentError("line: direction must be nonzero");
  PlanarCurve c;
  c.point = [=](double s) { return std::array<double, 2>{origin[0] + s * direction[0], origin[1] + s * direction[1]}; };
  c.tangent = [=](double) { return direction; };
  c.second = [](double) { return std::array<double, 2>{0.0, 0.0}; };
  c.s_min = s_min;
  c.s_max = s_max;
  c.guess = [=](std::array<double, 2> x) {
    return ((x[0] - origin[0]) * direction[0] + (x[1] - origin[1]) * direction[1]) / len2;
  };
  return c;
}

PlanarCurve PlanarCurve::circle(std::array<double, 2> center, double radius) {
  if (!(radius > 0.0)) throw ArgumentError("circle: radius must be > 0");
  PlanarCurve c;
  c.point = [=](double s) {
    return std::array<double, 2>{center[0] + radius * std::cos(s), center[1] + radius * std::sin(s)};
  };
  c.tangent = [=](double s) { return std::array<double, 2>{-radius * std::sin(s), radius * std::cos(s)}; };
  c.second = [=](double s) { return std::array<double, 2>{-radius * std::cos(s), -radius * std::sin(s)}; };
  c.s_min = 0.0;
  c.s_max = 2.0 * kPi;
  c.closed = true;
  c.guess = [=](std::array<double, 2> x) { return std::atan2(x[1] - center[1], x[0] - center[0]); };
  return c;
}

CurveProjection project_onto_curve(const PlanarCurve& curve, std::array<double, 2> x) {
  const double period = curve.s_max - curve.s_min;
  auto wrap = [&](double s) {
    if (curve.closed) {
      s = std::fmod(s - curve.s_min, period);
      if (s < 0) s += period;
      return curve.s_min + s;
    }
    return std::clamp(s, curve.s_min, curve.s_max);
  };
  auto dist2 = [&](double s) {
    const auto c = curve.point(s);
    return (c[0] - x[0]) * (c[0] - x[0]) + (c[1] - x[1]) * (c[1] - x[1]);
  };

  double s;
  if (curve.guess) {
    s = wrap(curve.guess(x));
  } else {
    constexpr int kSamples = 128;
    s = curve.s_min;
    double best = dist2(s);
    for (int i = 1; i <= kSamples; ++i) {
      const double si = curve.s_min + period * i / kSamples;
      const double d = dist2(si);
      if (d < best) {
        best = d;
        s = si;
      }
    }
  }

  for (int it = 0; it < 50; ++it) {
    const auto c = curve.point(s);
    const auto t = curve.tangent(s);
    const auto a = curve.second(s);
    const double rx = c[0] - x[0], ry = c[1] - x[1];
    const double g = rx * t[0] + ry * t[1];
    const double dg = t[0] * t[0] + t[1] * t[1] + rx * a[0] + ry * a[1];
    if (!(dg > 0.0)) break;  // outside the tube: curvature dominates
    const double step = g / dg;
    const double next = wrap(s - step);
    const bool done = std::abs(next - s) <= 1e-12 * (1.0 + std::abs(s));
    s = next;
    if (done) break;
  }

  CurveProjection pr;
  pr.s = s;
  pr.foot = curve.point(s);
  const auto t = curve.tangent(s);
  const double tn = std::hypot(t[0], t[1]);
  pr.normal = {-t[1] / tn, t[0] / tn};
  const double rx = x[0] - pr.foot[0], ry = x[1] - pr.foot[1];
  pr.signed_distance = rx * pr.normal[0] + ry * pr.normal[1];
  const double tangential = std::abs(rx * t[0] + ry * t[1]) / tn;
  const auto a = curve.second(s);
  const double kappa = std::abs(t[0] * a[1] - t[1] * a[0]) / (tn * tn * tn);
  pr.unique = tangential <= 1e-9 * (1.0 + std::hypot(rx, ry)) && std::abs(pr.signed_distance) * kappa < 1.0;
  return pr;
}

ParamFamily embed_curve_delta(const Mollifier& m, const ScaleNet& w, PlanarCurve curve, ParamFamily cutoff) {
  if (cutoff.dimension() != 2) throw ArgumentError("embed_curve_delta: cutoff must be a function on R^2");
  // Regularity check on the parameter range.
  for (int i = 0; i <= 32; ++i) {
    const double s = curve.s_min + (curve.s_max - curve.s_min) * i / 32.0;
    const auto t = curve.tangent(s);
    if (!(std::hypot(t[0], t[1]) > 0.0)) throw ArgumentError("embed_curve_delta: curve tangent vanishes");
  }
  auto eval = [m, w, curve, cutoff](double e, std::span<const double> p) -> cplx {
    const double we = w(e);
    const auto pr = project_onto_curve(curve, {p[0], p[1]});
    if (!pr.unique || std::abs(pr.signed_distance) >= m.support_radius() * we) return 0.0;
    return cutoff(e, p) * m(pr.signed_distance / we) / we;
  };
  auto deriv = [m, w, curve, cutoff, eval](double e, std::span<const double> p, std::span<const int> alpha) -> cplx {
    const int order = alpha[0] + alpha[1];
    if (order != 1) {
      ParamFamily self(2, eval);
      return self.fd_derivative(e, p, alpha, 1e-2 * w(e));
    }
    const double we = w(e);
    const auto pr = project_onto_curve(curve, {p[0], p[1]});
    if (!pr.unique || std::abs(pr.signed_distance) >= m.support_radius() * we) return 0.0;
    const std::size_t i = alpha[0] == 1 ? 0 : 1;
    const double z = pr.signed_distance / we;
    return cutoff.derivative(e, p, alpha) * m(z) / we + cutoff(e, p) * m.derivative(z, 1) * pr.normal[i] / (we * we);
  };
  return ParamFamily(2, eval, deriv, "curve-delta").with_declared_growth("moderate(1)");
}

ParamFamily embed_smooth(std::size_t dim, std::function<cplx(std::span<const double>)> f,
                         std::function<cplx(std::span<const double>, std::span<const int>)> df, std::string label) {
  ParamFamily::DerivFn d;
  if (df) d = [df](double, std::span<const double> p, std::span<const int> a) { return df(p, a); };
  return ParamFamily(dim, [f](double, std::span<const double> p) { return f(p); }, d, std::move(label))
      .with_declared_growth("moderate(0)");
}

ParamFamily gaussian_family(std::vector<double> center, double width, cplx amplitude) {
  if (!(width > 0.0)) throw ArgumentError("gaussian_family: width must be > 0");
  const std::size_t dim = center.size();
  auto f = [center, width, amplitude](std::span<const double> p) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < center.size(); ++i) {
      const double u = (p[i] - center[i]) / width;
      r2 += u * u;
    }
    return amplitude * std::exp(-0.5 * r2);
  };
  auto df = [center, width, amplitude](std::span<const double> p, std::span<const int> alpha) {
    cplx acc = amplitude;
    for (std::size_t i = 0; i < center.size(); ++i) {
      const double u = (p[i] - center[i]) / width;
      const int k = alpha[i];
      acc *= std::exp(-0.5 * u * u) * ((k % 2) ? -1.0 : 1.0) * hermite_prob(k, u) / std::pow(width, k);
    }
    return acc;
  };
  return embed_smooth(dim, f, df, "gaussian");
}

ParamFamily plateau_cutoff(std::vector<double> center, double inner, double outer) {
  if (!(outer > inner && inner >= 0.0)) throw ArgumentError("plateau_cutoff: need 0 <= inner < outer");
  const std::size_t dim = center.size();
  auto f = [center, inner, outer](std::span<const double> p) {
    double v = 1.0;
    for (std::size_t i = 0; i < center.size(); ++i) {
      const double r = std::abs(p[i] - center[i]);
      v *= smooth_step((outer - r) / (outer - inner));
    }
    return cplx(v);
  };
  return embed_smooth(dim, f, {}, "cutoff");
}

}  // namespace gfio
