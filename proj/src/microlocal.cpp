#include "gfio/microlocal.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "fftw_lock.hpp"
#include "gfio/asymptotics.hpp"

namespace gfio {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFloorFraction = 1e-8;
constexpr std::size_t kMinConeBins = 8;

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> normalized(std::vector<double> v) {
  const double n = norm(v);
  if (!(n > 0.0)) throw ArgumentError("zero direction vector");
  for (auto& x : v) x /= n;
  return v;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return kInf;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// |F| of the windowed samples on an N^d frequency lattice with spacing dxi.
struct Spectrum {
  std::size_t dim = 1;
  std::size_t N = 0;
  double dxi = 0.0;
  double floor = 0.0;
  std::vector<double> mag;

};

bool in_cone(const std::vector<double>& xi, double r, const std::vector<double>& dir, double half_angle) {
  if (xi.size() == 1) return xi[0] * dir[0] > 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < xi.size(); ++i) dot += xi[i] * dir[i];
  return dot >= r * std::cos(half_angle);
}

std::size_t cone_bins(std::size_t dim, double dxi, double xi_max, const std::vector<double>& dir,
                      double half_angle) {
  const long kmax = static_cast<long>(std::floor(xi_max / dxi));
  std::size_t count = 0;
  std::vector<double> xi(dim);
  if (dim == 1) {
    for (long k = -kmax; k <= kmax; ++k) {
      xi[0] = dxi * static_cast<double>(k);
      const double r = std::abs(xi[0]);
      if (r >= xi_max / 2 && r <= xi_max && in_cone(xi, r, dir, half_angle)) ++count;
    }
  } else {
    for (long a = -kmax; a <= kmax; ++a)
      for (long b = -kmax; b <= kmax; ++b) {
        xi[0] = dxi * static_cast<double>(a);
        xi[1] = dxi * static_cast<double>(b);
        const double r = norm(xi);
        if (r >= xi_max / 2 && r <= xi_max && in_cone(xi, r, dir, half_angle)) ++count;
      }
  }
  return count;
}

Spectrum windowed_spectrum(const FieldSource& u, const WFProbe& probe, double eps,
                           const std::vector<std::vector<double>>& directions) {
  const std::size_t d = probe.center.size();
  const double xi_max = probe.xi_max();
  const double h = sampling_step(xi_max, eps);
  const std::size_t m = static_cast<std::size_t>(std::floor(2.0 * probe.radius / h)) + 1;
  std::vector<double> lo(d);
  for (std::size_t i = 0; i < d; ++i) lo[i] = probe.center[i] - 0.5 * static_cast<double>(m - 1) * h;

  std::size_t N = next_pow2(m);
  const std::size_t cap = d == 1 ? (std::size_t{1} << 18) : (std::size_t{1} << 12);
  for (;;) {
    const double dxi = 2.0 * kPi / (static_cast<double>(N) * h);
    std::size_t worst = std::numeric_limits<std::size_t>::max();
    for (const auto& dir : directions)
      worst = std::min(worst, cone_bins(d, dxi, xi_max, dir, probe.half_angle));
    if (worst >= kMinConeBins) break;
    if (N >= cap) {
      std::ostringstream os;
      os << "probe at radius " << probe.radius << " cannot resolve " << kMinConeBins << " frequency bins per cone";
      throw ArgumentError(os.str());
    }
    N *= 2;
  }

  std::vector<std::size_t> shape(d, m);
  const auto samples = u(eps, lo, h, shape);
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= m;
  if (samples.size() != total) throw ArgumentError("field source returned the wrong number of samples");

  double mass = 0.0;
  for (const auto& v : samples) mass += std::abs(v);
  mass *= std::pow(h, static_cast<double>(d));

  std::size_t padded = 1;
  for (std::size_t i = 0; i < d; ++i) padded *= N;
  std::vector<cplx> in(padded, cplx(0.0)), out(padded);
  std::vector<double> x(d);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat, dst = 0, stride = 1;
    for (std::size_t ax = d; ax-- > 0;) {
      const std::size_t j = rem % m;
      rem /= m;
      x[ax] = lo[ax] + h * static_cast<double>(j);
      dst += j * stride;
      stride *= N;
    }
    in[dst] = probe.window(x) * samples[flat];
  }

  std::vector<int> dims(d, static_cast<int>(N));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(d), dims.data(), reinterpret_cast<fftw_complex*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  Spectrum s;
  s.dim = d;
  s.N = N;
  s.dxi = 2.0 * kPi / (static_cast<double>(N) * h);
  s.floor = kFloorFraction * mass;
  s.mag.resize(padded);
  const double scale = std::pow(h, static_cast<double>(d));
  for (std::size_t i = 0; i < padded; ++i) s.mag[i] = scale * std::abs(out[i]);
  return s;
}

struct ConeFit {
  double decay = kInf;
  double r2 = 1.0;
  double sup_weighted = 0.0;  // sup ⟨ξ⟩^{l_max} |F| over cone ∩ band
};

ConeFit fit_cone(const Spectrum& s, const WFProbe& probe, const std::vector<double>& dir) {
  const double xi_max = probe.xi_max();
  const double band_lo = xi_max / 2;
  const std::size_t shells = static_cast<std::size_t>(std::floor((xi_max - band_lo) / s.dxi)) + 1;
  std::vector<double> env(shells, 0.0), rad(shells, 0.0);
  ConeFit fit;

  auto visit = [&](const std::vector<double>& xi, double mag) {
    const double r = norm(xi);
    if (r < band_lo || r > xi_max || !in_cone(xi, r, dir, probe.half_angle)) return;
    const std::size_t k = std::min(shells - 1, static_cast<std::size_t>((r - band_lo) / s.dxi));
    if (mag >= env[k]) {
      env[k] = mag;
      rad[k] = r;
    }
    fit.sup_weighted = std::max(fit.sup_weighted, std::pow(japanese(r), probe.l_max) * mag);
  };

  const long kmax = static_cast<long>(std::floor(xi_max / s.dxi));
  const long N = static_cast<long>(s.N);
  auto idx = [N](long k) { return static_cast<std::size_t>((k + N) % N); };
  std::vector<double> xi(s.dim);
  if (s.dim == 1) {
    for (long k = -kmax; k <= kmax; ++k) {
      xi[0] = s.dxi * static_cast<double>(k);
      visit(xi, s.mag[idx(k)]);
    }
  } else {
    for (long a = -kmax; a <= kmax; ++a)
      for (long b = -kmax; b <= kmax; ++b) {
        xi[0] = s.dxi * static_cast<double>(a);
        xi[1] = s.dxi * static_cast<double>(b);
        visit(xi, s.mag[idx(a) * s.N + idx(b)]);
      }
  }

  // Monotone upper envelope from the outer edge inwards.
  for (std::size_t k = shells - 1; k-- > 0;) env[k] = std::max(env[k], env[k + 1]);
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < shells; ++k) {
    if (rad[k] <= 0.0 || env[k] <= s.floor) continue;
    lx.push_back(std::log(japanese(rad[k])));
    ly.push_back(std::log(env[k]));
  }
  if (lx.size() < 3) return fit;
  const auto lf = fit_line(lx, ly);
  fit.decay = -lf.slope;
  fit.r2 = lf.r2;
  return fit;
}

Verdict decide(double min_decay, double min_r2, double uniformity, const WFProbe& probe) {
  const double l = static_cast<double>(probe.l_max);
  if (min_decay >= l && uniformity <= probe.n_max) return Verdict::Regular;
  if ((min_decay >= l - 1.0 && min_decay < l) || (min_decay >= 2.0 && min_r2 < 0.9)) return Verdict::Borderline;
  return Verdict::Singular;
}

std::vector<DecayResult> probe_center(const FieldSource& u, const WFProbe& probe,
                                      const std::vector<std::vector<double>>& directions) {
  std::vector<DecayResult> res(directions.size());
  std::vector<std::vector<double>> sups(directions.size());
  for (double e : probe.eps_subgrid) {
    const auto s = windowed_spectrum(u, probe, e, directions);
    for (std::size_t j = 0; j < directions.size(); ++j) {
      const auto f = fit_cone(s, probe, directions[j]);
      res[j].eps.push_back(e);
      res[j].decay_rate.push_back(f.decay);
      res[j].fit_r2.push_back(f.r2);
      sups[j].push_back(f.sup_weighted > s.floor ? f.sup_weighted : 0.0);
    }
  }
  for (std::size_t j = 0; j < directions.size(); ++j) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < probe.eps_subgrid.size(); ++i) {
      if (sups[j][i] <= 0.0) continue;
      lx.push_back(std::log(1.0 / probe.eps_subgrid[i]));
      ly.push_back(std::log(sups[j][i]));
    }
    res[j].uniformity = lx.size() >= 2 ? fit_line(lx, ly).slope : 0.0;
    double min_r2 = 1.0;
    for (std::size_t i = 0; i < res[j].fit_r2.size(); ++i)
      if (std::isfinite(res[j].decay_rate[i])) min_r2 = std::min(min_r2, res[j].fit_r2[i]);
    res[j].verdict = decide(res[j].min_decay(), min_r2, res[j].uniformity, probe);
  }
  return res;
}

}  // namespace

FieldSource field_from_family(const ParamFamily& u) {
  return [u](double eps, const std::vector<double>& lo, double h, const std::vector<std::size_t>& n) {
    if (lo.size() != u.dimension() || n.size() != u.dimension())
      throw ArgumentError("field_from_family: dimension mismatch");
    std::size_t total = 1;
    for (auto k : n) total *= k;
    std::vector<cplx> out(total);
    std::vector<double> p(lo.size());
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (std::size_t ax = lo.size(); ax-- > 0;) {
        p[ax] = lo[ax] + h * static_cast<double>(rem % n[ax]);
        rem /= n[ax];
      }
      out[flat] = u(eps, p);
    }
    return out;
  };
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Regular:
      return "regular";
    case Verdict::Singular:
      return "singular";
    case Verdict::Borderline:
      return "borderline";
  }
  return "unknown";
}

void WFProbe::validate() const {
  if (center.empty() || center.size() > 2) throw ArgumentError("WFProbe: center must have 1 or 2 coordinates");
  if (direction.size() != center.size()) throw ArgumentError("WFProbe: direction dimension mismatch");
  if (!(radius > 0.0)) throw ArgumentError("WFProbe: radius must be positive");
  if (!(half_angle > 0.0 && half_angle < kPi / 2)) throw ArgumentError("WFProbe: half angle must lie in (0, pi/2)");
  if (eps_subgrid.empty()) throw ArgumentError("WFProbe: empty eps subgrid");
  for (double e : eps_subgrid)
    if (!(e > 0.0 && e <= 1.0)) throw ArgumentError("WFProbe: eps values must lie in (0, 1]");
  if (std::abs(norm(direction) - 1.0) > 1e-9) throw ArgumentError("WFProbe: direction must be a unit vector");
}

double WFProbe::window(const std::vector<double>& x) const {
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r2 += (x[i] - center[i]) * (x[i] - center[i]);
  if (r2 > radius * radius) return 0.0;
  const double s = sigma();
  return std::exp(-r2 / (2.0 * s * s));
}

std::vector<double> default_eps_subgrid(const std::vector<double>& grid, double xi_max) {
  std::vector<double> ok;
  for (double e : grid)
    if (e * xi_max <= 1.0) ok.push_back(e);
  std::sort(ok.begin(), ok.end(), std::greater<>());
  if (ok.size() > 2) ok.resize(2);
  if (ok.empty()) throw ArgumentError("default_eps_subgrid: no grid value satisfies eps*xi_max <= 1");
  return ok;
}

double sampling_step(double xi_max, double eps) { return std::min(kPi / (2.0 * xi_max), eps / 3.0); }

double DecayResult::min_decay() const {
  double m = kInf;
  for (double v : decay_rate) m = std::min(m, v);
  return m;
}

DecayResult directional_decay(const FieldSource& u, const WFProbe& probe) {
  probe.validate();
  return probe_center(u, probe, {probe.direction}).front();
}

DecayResult directional_decay(const ParamFamily& u, const WFProbe& probe) {
  return directional_decay(field_from_family(u), probe);
}

std::vector<WFRecord> WFEstimate::singular() const {
  std::vector<WFRecord> out;
  for (const auto& r : records)
    if (r.verdict == Verdict::Singular) out.push_back(r);
  return out;
}

std::vector<std::vector<double>> default_directions(std::size_t dim) {
  if (dim == 1) return {{1.0}, {-1.0}};
  if (dim != 2) throw ArgumentError("default_directions: dimension must be 1 or 2");
  std::vector<std::vector<double>> dirs;
  for (int k = 0; k < 16; ++k) {
    const double a = k * kPi / 8.0;
    dirs.push_back({std::cos(a), std::sin(a)});
  }
  return dirs;
}

WFEstimate estimate_wavefront(const FieldSource& u, const std::vector<std::vector<double>>& centers,
                              const std::vector<std::vector<double>>& directions, const WFProbe& probe_template) {
  if (directions.empty()) throw ArgumentError("estimate_wavefront: no directions");
  WFEstimate est;
  for (const auto& c : centers) {
    WFProbe p = probe_template;
    p.center = c;
    p.direction = directions.front();
    p.validate();
    for (const auto& d : directions)
      if (d.size() != c.size() || std::abs(norm(d) - 1.0) > 1e-9)
        throw ArgumentError("estimate_wavefront: directions must be unit vectors of the center dimension");
    const auto res = probe_center(u, p, directions);
    for (std::size_t j = 0; j < directions.size(); ++j)
      est.records.push_back({c, directions[j], res[j].min_decay(), res[j].uniformity, res[j].verdict});
  }
  return est;
}

WFEstimate estimate_wavefront(const ParamFamily& u, const std::vector<std::vector<double>>& centers,
                              const std::vector<std::vector<double>>& directions, const WFProbe& probe_template) {
  return estimate_wavefront(field_from_family(u), centers, directions, probe_template);
}

FlowMap::FlowMap(std::shared_ptr<const CharFlow> flow, double t, std::vector<double> eps)
    : flow_(std::move(flow)), t_(t), eps_(std::move(eps)) {
  if (!flow_) throw ArgumentError("FlowMap: missing flow");
  if (eps_.empty()) throw ArgumentError("FlowMap: empty eps grid");
  std::sort(eps_.begin(), eps_.end(), std::greater<>());
}

FlowMap::PhasePoint FlowMap::chi(double eps, const std::vector<double>& x, const std::vector<double>& xi) const {
  const std::size_t n = flow_->dimension();
  if (x.size() != n || xi.size() != n) throw ArgumentError("chi: dimension mismatch");
  const auto st = flow_->trace(eps, x, t_, 0.0, true, false);
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(xi.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd w = st.jac.transpose().fullPivLu().solve(v);
  return {st.gamma, std::vector<double>(w.data(), w.data() + w.size())};
}

FlowMap::PhasePoint FlowMap::chi_inverse(double eps, const std::vector<double>& y,
                                         const std::vector<double>& eta) const {
  const std::size_t n = flow_->dimension();
  if (y.size() != n || eta.size() != n) throw ArgumentError("chi_inverse: dimension mismatch");
  const auto x = flow_->gamma(eps, y, 0.0, t_);
  const auto J = flow_->jac(eps, x, t_, 0.0);
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(eta.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd w = J.transpose() * v;
  return {x, std::vector<double>(w.data(), w.data() + w.size())};
}

void FlowMap::fit_limit(const std::vector<std::vector<double>>& xs, const std::vector<std::vector<double>>& xis,
                        double threshold) {
  if (xs.empty() || xis.empty()) throw ArgumentError("fit_limit: empty sample set");
  const std::size_t start = eps_.size() >= 4 ? eps_.size() / 2 : 0;
  gap_ = 0.0;
  std::vector<PhasePoint> prev;
  for (std::size_t i = start; i < eps_.size(); ++i) {
    std::vector<PhasePoint> cur;
    for (const auto& x : xs)
      for (const auto& xi : xis) cur.push_back(chi(eps_[i], x, xi));
    if (!prev.empty())
      for (std::size_t k = 0; k < cur.size(); ++k) {
        const double dx = distance(cur[k].first, prev[k].first);
        const double dxi = distance(cur[k].second, prev[k].second);
        gap_ = std::max(gap_, std::hypot(dx, dxi));
      }
    prev = std::move(cur);
  }
  has_limit_ = eps_.size() - start >= 2 && gap_ <= threshold;
}

FlowMap::PhasePoint FlowMap::chi_limit(const std::vector<double>& x, const std::vector<double>& xi) const {
  if (!has_limit_) throw ArgumentError("chi_limit: the flow has no established limit");
  return chi(eps_.back(), x, xi);
}

FlowMap::PhasePoint FlowMap::chi_limit_inverse(const std::vector<double>& y, const std::vector<double>& eta) const {
  if (!has_limit_) throw ArgumentError("chi_limit_inverse: the flow has no established limit");
  return chi_inverse(eps_.back(), y, eta);
}

double FlowMap::bijectivity_error(const std::vector<std::vector<double>>& xs,
                                  const std::vector<std::vector<double>>& xis) const {
  double err = 0.0;
  for (double e : eps_)
    for (const auto& x : xs)
      for (const auto& xi : xis) {
        const auto fwd = chi(e, x, xi);
        const auto back = chi_inverse(e, fwd.first, fwd.second);
        err = std::max(err, std::hypot(distance(back.first, x), distance(back.second, xi)));
      }
  return err;
}

FlowMap hamiltonian_flow(std::shared_ptr<const CharFlow> flow, double t, const std::vector<double>& eps,
                         const std::vector<std::vector<double>>& sample_x, double threshold) {
  FlowMap fm(flow, t, eps);
  const std::size_t n = flow->dimension();
  for (double e : fm.eps())
    for (const auto& x : sample_x) {
      const double det = flow->jac(e, x, t, 0.0).determinant();
      if (!(std::abs(det) > 1e-12)) throw SolverError("singular characteristic Jacobian", e, x);
    }
  std::vector<std::vector<double>> xis;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(n, 0.0);
    v[i] = 1.0;
    xis.push_back(v);
  }
  fm.fit_limit(sample_x, xis, threshold);
  return fm;
}

std::vector<WFRecord> predict_wavefront(const FlowMap& fm, const WFEstimate& wf0) {
  std::vector<WFRecord> out;
  for (const auto& r : wf0.singular()) {
    const auto img = fm.chi_limit_inverse(r.position, r.direction);
    WFRecord p = r;
    p.position = img.first;
    p.direction = normalized(img.second);
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::vector<double> eta_gradient(const LimitPhase& phi, double t, const std::vector<double>& x,
                                 const std::vector<double>& eta) {
  std::vector<double> g(eta.size());
  auto e = eta;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(eta[i]));
    e[i] = eta[i] + h;
    const double fp = phi(t, x, e);
    e[i] = eta[i] - h;
    const double fm = phi(t, x, e);
    e[i] = eta[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace

std::vector<WFRecord> spacetime_wf_bound(const LimitPhase& phi, const std::vector<WFRecord>& wf0,
                                         const std::vector<double>& times, const std::vector<Interval>& exclusions) {
  for (double t : times)
    for (const auto& iv : exclusions)
      if (t >= iv.lo && t <= iv.hi) {
        std::ostringstream os;
        os << "time " << t << " lies inside the excluded interval [" << iv.lo << ", " << iv.hi << "]";
        throw ArgumentError(os.str());
      }

  std::vector<WFRecord> out;
  for (double t : times)
    for (const auto& r : wf0) {
      if (r.verdict != Verdict::Singular) continue;
      const std::size_t n = r.position.size();
      const auto& eta = r.direction;
      std::vector<double> x = r.position;
      bool converged = false;
      for (int it = 0; it < 50 && !converged; ++it) {
        const auto g = eta_gradient(phi, t, x, eta);
        Eigen::VectorXd res(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) res[static_cast<Eigen::Index>(i)] = g[i] - r.position[i];
        if (res.norm() < 1e-10) {
          converged = true;
          break;
        }
        Eigen::MatrixXd J(n, n);
        auto xp = x;
        for (std::size_t j = 0; j < n; ++j) {
          const double h = 1e-5 * std::max(1.0, std::abs(x[j]));
          xp[j] = x[j] + h;
          const auto gp = eta_gradient(phi, t, xp, eta);
          xp[j] = x[j] - h;
          const auto gm = eta_gradient(phi, t, xp, eta);
          xp[j] = x[j];
          for (std::size_t i = 0; i < n; ++i)
            J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (gp[i] - gm[i]) / (2.0 * h);
        }
        const Eigen::VectorXd dx = J.fullPivLu().solve(res);
        for (std::size_t i = 0; i < n; ++i) x[i] -= dx[static_cast<Eigen::Index>(i)];
        if (dx.norm() < 1e-12) converged = true;
      }
      if (!converged) {
        auto w = x;
        w.insert(w.begin(), t);
        throw SolverError("Newton iteration for the stationary point did not converge", 0.0, w);
      }

      // Covector (∂_tφ, ∇_xφ).
      std::vector<double> cov(n + 1);
      const double ht = 1e-5;
      cov[0] = (phi(t + ht, x, eta) - phi(t - ht, x, eta)) / (2.0 * ht);
      auto xp = x;
      for (std::size_t j = 0; j < n; ++j) {
        const double h = 1e-5 * std::max(1.0, std::abs(x[j]));
        xp[j] = x[j] + h;
        const double fp = phi(t, xp, eta);
        xp[j] = x[j] - h;
        const double fm = phi(t, xp, eta);
        xp[j] = x[j];
        cov[j + 1] = (fp - fm) / (2.0 * h);
      }
      WFRecord rec = r;
      rec.position = x;
      rec.position.insert(rec.position.begin(), t);
      rec.direction = normalized(cov);
      out.push_back(std::move(rec));
    }
  return out;
}

double direction_angle(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return kPi;
  const double na = norm(a), nb = norm(b);
  if (!(na > 0.0 && nb > 0.0)) return kPi;
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::acos(std::clamp(dot / (na * nb), -1.0, 1.0));
}

WFComparison compare_wf(const std::vector<WFRecord>& estimated, const std::vector<WFRecord>& predicted, double pos_tol,
                        double ang_tol) {
  auto near = [&](const WFRecord& a, const WFRecord& b) {
    return distance(a.position, b.position) <= pos_tol && direction_angle(a.direction, b.direction) <= ang_tol;
  };
  WFComparison cmp;
  for (const auto& p : predicted) {
    const WFRecord* best = nullptr;
    double best_d = kInf;
    for (const auto& e : estimated)
      if (near(p, e)) {
        const double d = distance(p.position, e.position);
        if (d < best_d) {
          best_d = d;
          best = &e;
        }
      }
    if (best)
      cmp.matches.emplace_back(p, *best);
    else
      cmp.misses.push_back(p);
  }
  for (const auto& e : estimated) {
    const bool any = std::any_of(predicted.begin(), predicted.end(), [&](const WFRecord& p) { return near(p, e); });
    if (!any) cmp.spurious.push_back(e);
  }
  return cmp;
}

namespace {

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

void put_vec(std::ostream& os, const std::vector<double>& v) {
  for (double x : v) {
    os << ',';
    put(os, x);
  }
}

}  // namespace

void write_csv(std::ostream& os, const WFEstimate& wf) {
  const std::size_t d = wf.records.empty() ? 1 : wf.records.front().position.size();
  for (std::size_t i = 0; i < d; ++i) os << (i ? "," : "") << "x" << i;
  for (std::size_t i = 0; i < d; ++i) os << ",xi" << i;
  os << ",decay_rate,uniformity,verdict\n";
  for (const auto& r : wf.records) {
    for (std::size_t i = 0; i < r.position.size(); ++i) {
      if (i) os << ',';
      put(os, r.position[i]);
    }
    put_vec(os, r.direction);
    os << ',';
    put(os, r.decay_rate);
    os << ',';
    put(os, r.uniformity);
    os << ',' << to_string(r.verdict) << '\n';
  }
}

void write_csv(std::ostream& os, const WFComparison& cmp) {
  std::size_t d = 1;
  if (!cmp.matches.empty())
    d = cmp.matches.front().first.position.size();
  else if (!cmp.misses.empty())
    d = cmp.misses.front().position.size();
  else if (!cmp.spurious.empty())
    d = cmp.spurious.front().position.size();
  os << "status";
  for (const char* p : {"pred", "est"}) {
    for (std::size_t i = 0; i < d; ++i) os << ',' << p << "_x" << i;
    for (std::size_t i = 0; i < d; ++i) os << ',' << p << "_xi" << i;
  }
  os << '\n';
  const std::vector<double> blank(2 * d, std::nan(""));
  auto row = [&](const char* status, const WFRecord* p, const WFRecord* e) {
    os << status;
    if (p) {
      put_vec(os, p->position);
      put_vec(os, p->direction);
    } else {
      put_vec(os, blank);
    }
    if (e) {
      put_vec(os, e->position);
      put_vec(os, e->direction);
    } else {
      put_vec(os, blank);
    }
    os << '\n';
  };
  for (const auto& m : cmp.matches) row("match", &m.first, &m.second);
  for (const auto& m : cmp.misses) row("miss", &m, nullptr);
  for (const auto& s : cmp.spurious) row("spurious", nullptr, &s);
}

}  // namespace gfio
