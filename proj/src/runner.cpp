#include "gfio/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "gfio/asymptotics.hpp"
#include "gfio/fio.hpp"
#include "gfio/pseudo.hpp"
#include "json.hpp"

namespace gfio {

namespace {

constexpr double kFlowTolerance = 1e-7;
constexpr double kBijectivityTolerance = 1e-6;
constexpr double kAngularBin = kPi / 8.0;
constexpr double kAngularTolerance = kAngularBin + 1e-3;
constexpr double kPositionSlack = 1e-6;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex m;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 0; k < std::min<int>(jobs, static_cast<int>(n)); ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

WFEstimate estimate_parallel(const FieldSource& u, const std::vector<std::vector<double>>& centers,
                             const std::vector<std::vector<double>>& dirs, const WFProbe& tmpl, int jobs) {
  std::vector<WFEstimate> parts(centers.size());
  parallel_for(centers.size(), jobs,
               [&](std::size_t i) { parts[i] = estimate_wavefront(u, {centers[i]}, dirs, tmpl); });
  WFEstimate all;
  for (auto& p : parts) all.records.insert(all.records.end(), p.records.begin(), p.records.end());
  return all;
}

GridFunction fio_characteristic(const PhaseAmp& p, const CharFlow& flow, const ParamFamily& u0, double t,
                                const UniformGrid& grid, const std::vector<double>& eps, int jobs) {
  std::vector<GridFunction> parts(eps.size());
  parallel_for(eps.size(), jobs,
               [&](std::size_t i) { parts[i] = apply_fio_characteristic(p, flow, u0, t, grid, {eps[i]}); });
  GridFunction out{grid, t, eps, {}};
  for (auto& g : parts) out.values.push_back(std::move(g.values.front()));
  return out;
}

/// Box carried by the limit flow, snapped outwards to the probe lattice.
std::pair<std::vector<double>, std::vector<double>> carried_box(const FlowMap& fm, const WavefrontSpec& w) {
  const std::size_t d = w.lo.size();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  std::vector<double> e1(d, 0.0);
  e1[0] = 1.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
    std::vector<double> c(d);
    for (std::size_t i = 0; i < d; ++i) c[i] = (corner >> i) & 1 ? w.hi[i] : w.lo[i];
    const auto img = fm.chi_limit_inverse(c, e1).first;
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], img[i]);
      hi[i] = std::max(hi[i], img[i]);
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = std::floor(lo[i] / w.cell + 1e-6) * w.cell;
    hi[i] = std::ceil(hi[i] / w.cell - 1e-6) * w.cell;
  }
  return {lo, hi};
}

class Pipeline {
 public:
  Pipeline(const Scenario& s, const RunOptions& opt) : s_(s), opt_(opt), eps_(s.eps()) {}

  Report run() {
    const auto start = std::chrono::steady_clock::now();
    report_.scenario = s_.name;
    if (!opt_.out_dir.empty()) std::filesystem::create_directories(opt_.out_dir);
    if (s_.coefficient) {
      stage("regularize", [&] { regularize(); });
      stage("characteristics", [&] { characteristics(); });
      stage("fio", [&] { fio(); });
      if (s_.wavefront) stage("microlocal", [&] { microlocal(); });
    }
    if (s_.pseudo) stage("pseudo", [&] { pseudo(); });
    report_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!opt_.out_dir.empty()) {
      report_.artifacts.push_back("report.json");
      std::ofstream os(std::filesystem::path(opt_.out_dir) / "report.json");
      write_report_json(os, report_);
    }
    return report_;
  }

 private:
  template <class F>
  void stage(const std::string& name, F&& body) {
    current_ = name;
    try {
      body();
    } catch (const StageError&) {
      throw;
    } catch (const SolverError& e) {
      throw StageError(name, e.what(), e.eps());
    } catch (const Error& e) {
      throw StageError(name, e.what());
    }
  }

  void add(const std::string& name, bool passed, double value, double threshold, std::string detail = {}) {
    report_.checks.push_back({current_, name, passed, value, threshold, std::move(detail)});
  }

  /// Opens an artifact; returns a null stream when artifacts are disabled.
  std::ofstream artifact(const std::string& file) {
    if (opt_.out_dir.empty()) return {};
    report_.artifacts.push_back(file);
    return std::ofstream(std::filesystem::path(opt_.out_dir) / file);
  }

  double t_max() const {
    double t = 2.0;
    for (double v : s_.times) t = std::max(t, v);
    return t;
  }

  std::vector<double> data_center() const { return s_.data->center; }

  void ensure_flow() {
    if (flow_) return;
    cs_ = build_coefficients(s_);
    flow_ = solve_characteristics(cs_, s_.tolerances.ode);
    phase_ = transport_amplitude(flow_);
    u0_ = build_data(s_, *s_.data);
    if (s_.control) control_ = build_data(s_, *s_.control);
  }

  void regularize() {
    ensure_flow();
    const auto k = build_time_profile(s_);
    double vmax = 0.0;
    for (double v : s_.coefficient->velocity) vmax = std::max(vmax, std::abs(v));
    std::vector<double> ts;
    const std::size_t nt = 4000;
    for (std::size_t i = 0; i <= nt; ++i) ts.push_back(t_max() * static_cast<double>(i) / nt);
    ts.push_back(s_.coefficient->at);

    struct Net {
      std::string name;
      std::function<double(double)> f;
    };
    std::vector<Net> nets;
    nets.push_back({"coefficient_sup", [&](double e) {
                      double m = 0.0;
                      for (double t : ts) m = std::max(m, std::abs(k(e, t)));
                      return vmax * m;
                    }});
    nets.push_back({"coefficient_dt_sup", [&](double e) {
                      double m = 0.0;
                      const int a = 1;
                      for (double t : ts)
                        m = std::max(m, std::abs(k.derivative(e, std::span<const double>(&t, 1),
                                                              std::span<const int>(&a, 1))));
                      return vmax * m;
                    }});
    nets.push_back({"data_sup", [&](double e) {
                      double m = std::abs(u0_(e, data_center()));
                      for (const auto& x : s_.grid.points()) m = std::max(m, std::abs(u0_(e, x)));
                      return m;
                    }});

    auto cls_csv = artifact("classification.csv");
    auto val_csv = artifact("net_values.csv");
    cls_csv << "net,kind,moderate_exponent,slope,fit_quality\n";
    val_csv << "net,eps,value\n";
    for (const auto& net : nets) {
      const auto samples = NetSamples::sample(eps_, net.f);
      const auto c = classify_net(samples);
      cls_csv << net.name << ',' << to_string(c.kind) << ',' << c.moderate_exponent << ',' << num(c.slope) << ','
              << num(c.fit_quality) << '\n';
      for (std::size_t i = 0; i < eps_.size(); ++i)
        val_csv << net.name << ',' << num(eps_[i]) << ',' << num(samples.values[i]) << '\n';
      if (net.name == "coefficient_sup")
        add("coefficient_log_type", c.kind == GrowthKind::LogType || c.kind == GrowthKind::Negligible, c.slope,
            kSlopeTolerance, c.describe());
    }
  }

  std::vector<double> shift_at(double e, double t) const {
    std::vector<double> x0(s_.dimension, 0.0);
    const auto g = flow_->gamma(e, x0, t, 0.0);
    std::vector<double> sh(s_.dimension);
    for (std::size_t i = 0; i < sh.size(); ++i) sh[i] = x0[i] - g[i];
    return sh;
  }

  void characteristics() {
    ensure_flow();
    std::vector<double> tset{0.0, 0.5, 1.0, 1.5, 2.0};
    for (double t : s_.times) tset.push_back(t);
    for (double t = 0.0; t <= t_max() + 1e-12; t += 0.125) tset.push_back(t);
    std::sort(tset.begin(), tset.end());
    tset.erase(std::unique(tset.begin(), tset.end()), tset.end());

    auto csv = artifact("flow_shift.csv");
    csv << "eps,t";
    for (std::size_t i = 0; i < s_.dimension; ++i) csv << ",shift" << i;
    csv << ",closed_form_error\n";
    double worst = 0.0;
    for (double e : eps_)
      for (double t : tset) {
        const auto sh = shift_at(e, t);
        const double lam = closed_form_shift(s_, e, t);
        double err = 0.0;
        for (std::size_t i = 0; i < sh.size(); ++i)
          err = std::max(err, std::abs(sh[i] - s_.coefficient->velocity[i] * lam));
        worst = std::max(worst, err);
        csv << num(e) << ',' << num(t);
        for (double v : sh) csv << ',' << num(v);
        csv << ',' << num(err) << '\n';
      }
    add("flow_closed_form", worst <= kFlowTolerance, worst, kFlowTolerance);

    for (const auto& ex : s_.expected_shifts) {
      double err = 0.0;
      for (double e : eps_) {
        const auto sh = shift_at(e, ex.t);
        for (std::size_t i = 0; i < sh.size(); ++i) err = std::max(err, std::abs(sh[i] - ex.shift[i]));
      }
      add("shift_t=" + tag(ex.t), err <= kFlowTolerance, err, kFlowTolerance, "max over the eps grid");
    }

    for (double t : s_.times) {
      std::vector<double> svals;
      for (int i = 0; i <= 8; ++i) svals.push_back(t * i / 8.0);
      std::vector<std::vector<double>> xs{data_center()};
      auto tr = artifact("trajectories_t" + tag(t) + ".csv");
      write_trajectory_csv(tr, *flow_, eps_, xs, t, svals);
    }

    auto pts = s_.residual_points;
    if (pts.empty())
      for (double t : s_.times) {
        std::vector<double> p{t};
        const auto c = data_center();
        p.insert(p.end(), c.begin(), c.end());
        pts.push_back(p);
      }
    const auto res = eikonal_residual(phase_, cs_, pts, eps_);
    auto rc = artifact("eikonal_residual.csv");
    rc << "eps,residual\n";
    double rmax = 0.0;
    for (std::size_t i = 0; i < eps_.size(); ++i) {
      rc << num(eps_[i]) << ',' << num(res[i]) << '\n';
      rmax = std::max(rmax, res[i]);
    }
    add("eikonal_residual", rmax <= s_.tolerances.eikonal, rmax, s_.tolerances.eikonal);
  }

  void fio() {
    ensure_flow();
    const bool one_d = s_.dimension == 1;
    std::vector<double> slice_eps = eps_;
    if (!one_d) slice_eps = {eps_.front(), eps_[eps_.size() / 2], eps_.back()};

    auto eq = artifact("fio_equivalence.csv");
    if (one_d) eq << "data,t,eps,max_diff\n";
    double worst = 0.0;
    std::size_t full_compared = 0, total_full = 0, delta_compared = 0, total_delta = 0;
    for (double t : s_.times) {
      const auto sol = fio_characteristic(phase_, *flow_, u0_, t, s_.grid, slice_eps, opt_.jobs);
      auto sc = artifact("solution_t" + tag(t) + ".csv");
      write_csv(sc, sol);
      if (!one_d) continue;

      std::vector<std::pair<std::string, const ParamFamily*>> families{{"data", &u0_}};
      std::vector<const DataSpec*> specs{&*s_.data};
      if (s_.control) {
        families.push_back({"control", &control_});
        specs.push_back(&*s_.control);
      }
      for (std::size_t f = 0; f < families.size(); ++f) {
        const bool smooth = specs[f]->kind == "gaussian";
        const auto& fam = *families[f].second;
        const auto ch = fio_characteristic(phase_, *flow_, fam, t, s_.grid, eps_, opt_.jobs);
        std::vector<double> diffs(eps_.size(), -1.0);
        // Singular data are compared on the ε prefix the grid resolves.
        std::size_t resolved = eps_.size();
        if (!smooth)
          for (std::size_t i = 0; i < eps_.size(); ++i) {
            try {
              apply_fio_oscillatory(phase_, fam, t, s_.grid, {eps_[i]});
            } catch (const ResolutionError&) {
              resolved = i;
              break;
            }
          }
        parallel_for(resolved, opt_.jobs, [&](std::size_t i) {
          const auto osc = apply_fio_oscillatory(phase_, fam, t, s_.grid, {eps_[i]});
          double d = 0.0;
          for (std::size_t j = 0; j < osc.values[0].size(); ++j)
            d = std::max(d, std::abs(osc.values[0][j] - ch.values[i][j]));
          diffs[i] = d;
        });
        for (std::size_t i = 0; i < resolved; ++i) {
          worst = std::max(worst, diffs[i]);
          eq << families[f].first << ',' << num(t) << ',' << num(eps_[i]) << ',' << num(diffs[i]) << '\n';
        }
        (smooth ? full_compared : delta_compared) += resolved;
        (smooth ? total_full : total_delta) += eps_.size();
      }
    }
    if (one_d) {
      std::ostringstream d;
      d << "smooth data " << full_compared << "/" << total_full << " eps; singular data " << delta_compared << "/"
        << total_delta << " eps resolved";
      const bool covered = total_full == 0 ? delta_compared > 0 : full_compared == total_full;
      add("fio_equivalence", covered && worst <= s_.tolerances.fio, worst, s_.tolerances.fio, d.str());
    }
  }

  void microlocal() {
    ensure_flow();
    const auto& w = *s_.wavefront;
    const auto dirs = default_directions(s_.dimension);
    WFProbe tmpl;
    tmpl.radius = w.radius;
    tmpl.eps_subgrid = default_eps_subgrid(eps_, tmpl.xi_max());
    const double pos_tol = w.cell + kPositionSlack;
    const double ang_tol = kAngularTolerance;

    const auto centers0 = lattice(w.lo, w.hi, w.cell);
    const auto wf0 = estimate_parallel(field_from_family(u0_), centers0, dirs, tmpl, opt_.jobs);
    {
      auto os = artifact("wf0.csv");
      write_csv(os, wf0);
    }

    std::vector<std::vector<double>> unit;
    for (std::size_t i = 0; i < s_.dimension; ++i) {
      std::vector<double> v(s_.dimension, 0.0);
      v[i] = 1.0;
      unit.push_back(v);
    }
    std::vector<std::vector<double>> bij_pts;
    for (std::size_t i = 0; i < centers0.size(); i += std::max<std::size_t>(1, centers0.size() / 4))
      bij_pts.push_back(centers0[i]);

    auto lim = artifact("flow_limit.csv");
    lim << "t,cauchy_gap,has_limit,bijectivity_error\n";
    for (double t : s_.times) {
      const auto fm = hamiltonian_flow(flow_, t, eps_, centers0, s_.tolerances.flow_limit);
      const double bij = fm.bijectivity_error(bij_pts, unit);
      lim << num(t) << ',' << num(fm.cauchy_gap()) << ',' << (fm.has_limit() ? 1 : 0) << ',' << num(bij) << '\n';
      add("flow_limit_t=" + tag(t), fm.has_limit(), fm.cauchy_gap(), s_.tolerances.flow_limit);
      add("flow_bijective_t=" + tag(t), bij <= kBijectivityTolerance, bij, kBijectivityTolerance);
      if (!fm.has_limit()) {
        add("wf_propagation_t=" + tag(t), false, 0.0, 0.0, "no limit flow");
        continue;
      }
      for (const auto& ex : s_.expected_shifts) {
        if (std::abs(ex.t - t) > 1e-12) continue;
        double err = 0.0;
        for (const auto& x : centers0)
          for (const auto& xi : unit) {
            const auto img = fm.chi_limit(x, xi);
            for (std::size_t i = 0; i < s_.dimension; ++i)
              err = std::max({err, std::abs(img.first[i] - (x[i] - ex.shift[i])), std::abs(img.second[i] - xi[i])});
          }
        add("limit_flow_t=" + tag(t), err <= s_.tolerances.flow_limit, err, s_.tolerances.flow_limit,
            "sup over the probe lattice of |chi_limit - (x - shift, xi)|");
      }

      const auto box = carried_box(fm, w);
      const auto centers = lattice(box.first, box.second, w.cell);
      const auto predicted = predict_wavefront(fm, wf0);
      const auto est = estimate_parallel(solution_field(phase_, flow_, u0_, t), centers, dirs, tmpl, opt_.jobs);
      const auto cmp = compare_wf(est.singular(), predicted, pos_tol, ang_tol);
      {
        auto os = artifact("wf_t" + tag(t) + ".csv");
        write_csv(os, est);
        auto oc = artifact("wf_compare_t" + tag(t) + ".csv");
        write_csv(oc, cmp);
      }
      std::ostringstream d;
      d << cmp.matches.size() << " matches, " << cmp.misses.size() << " misses, " << cmp.spurious.size()
        << " spurious; " << predicted.size() << " predicted, " << est.singular().size() << " singular";
      add("wf_propagation_t=" + tag(t), cmp.ok() && !(predicted.empty() && !wf0.singular().empty()),
          static_cast<double>(cmp.misses.size() + cmp.spurious.size()), 0.0, d.str());

      if (s_.control) {
        const auto ec =
            estimate_parallel(solution_field(phase_, flow_, control_, t), centers, dirs, tmpl, opt_.jobs);
        auto os = artifact("wf_control_t" + tag(t) + ".csv");
        write_csv(os, ec);
        const auto n = ec.singular().size();
        add("control_regular_t=" + tag(t), n == 0, static_cast<double>(n), 0.0, "singular records for smooth data");
      }
    }

    if (s_.spacetime) spacetime(wf0);
  }

  void spacetime(const WFEstimate& wf0) {
    const auto& st = *s_.spacetime;
    const auto dirs = default_directions(2);
    WFProbe tmpl;
    tmpl.radius = st.radius;
    tmpl.eps_subgrid = default_eps_subgrid(eps_, tmpl.xi_max());
    const double emin = eps_.back();
    auto flow = flow_;
    const LimitPhase phi = [flow, emin](double t, const std::vector<double>& x, const std::vector<double>& eta) {
      const auto g = flow->gamma(emin, x, t, 0.0);
      double v = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) v += g[i] * eta[i];
      return v;
    };
    std::vector<double> rows;
    for (const auto& iv : st.rows)
      for (long k = static_cast<long>(std::ceil(iv.lo / st.cell - 1e-9));
           static_cast<double>(k) * st.cell <= iv.hi + 1e-9; ++k)
        rows.push_back(static_cast<double>(k) * st.cell);
    const auto predicted = spacetime_wf_bound(phi, wf0.singular(), rows, st.exclusions);

    std::vector<std::vector<double>> centers;
    for (const auto& p : predicted) {
      const double xc = std::round(p.position[1] / st.cell) * st.cell;
      for (int c = -st.columns; c <= st.columns; ++c) centers.push_back({p.position[0], xc + c * st.cell});
    }
    std::sort(centers.begin(), centers.end());
    centers.erase(std::unique(centers.begin(), centers.end(),
                              [](const auto& a, const auto& b) {
                                return std::abs(a[0] - b[0]) < 1e-12 && std::abs(a[1] - b[1]) < 1e-12;
                              }),
                  centers.end());

    const auto est = estimate_parallel(spacetime_field(phase_, flow_, u0_), centers, dirs, tmpl, opt_.jobs);
    const auto cmp = compare_wf(est.singular(), predicted, st.cell + kPositionSlack, kAngularTolerance);
    {
      auto os = artifact("spacetime_wf.csv");
      write_csv(os, est);
      auto oc = artifact("spacetime_compare.csv");
      write_csv(oc, cmp);
    }
    std::ostringstream d;
    d << cmp.matches.size() << " matches, " << cmp.misses.size() << " misses, " << cmp.spurious.size()
      << " spurious over " << centers.size() << " space-time probes";
    add("spacetime_wf", cmp.ok() && !predicted.empty(), static_cast<double>(cmp.misses.size() + cmp.spurious.size()),
        0.0, d.str());
  }

  void pseudo() {
    const auto& ps = *s_.pseudo;
    const double ca = ps.c_amplitude;
    const auto a1 = SymbolFamily::japanese([ca](double t) { return 1.0 + ca * std::sin(t); });
    const double ga = ps.g_amplitude, gw = ps.g_width;
    const auto a0 = SymbolFamily::japanese_power(
        [ga, gw](double x, int k) { return gaussian_derivative(x, ga, gw, k); }, ps.kappa);
    const auto a0_flat =
        SymbolFamily::japanese_power([ga](double, int k) { return k == 0 ? ga : 0.0; }, ps.kappa, true);
    const double e0 = eps_.front();

    std::vector<double> times, etas;
    for (const auto& p : ps.points) times.push_back(p.first);
    for (double m : ps.magnitudes) etas.push_back(m * ps.eta_direction);
    const auto phase = pseudo_phase(a1);
    const double pr = pseudo_eikonal_residual(phase, a1, e0, times, etas);
    add("pseudo_eikonal_residual", pr <= s_.tolerances.eikonal, pr, s_.tolerances.eikonal);

    const auto bs = build_parametrix(a1, a0, ps.k_max, ps.nodes);
    auto csv = artifact("parametrix_residual.csv");
    csv << "K,magnitude,residual,slope,r2\n";
    std::vector<double> slopes;
    for (int K = 0; K <= ps.k_max; ++K) {
      const std::vector<SymbolFamily> prefix(bs.begin(), bs.begin() + K + 1);
      const auto fit =
          parametrix_residual(prefix, a1, a0, ps.points, ps.eta_direction, ps.magnitudes, {e0}).front();
      slopes.push_back(fit.slope);
      for (std::size_t i = 0; i < fit.magnitudes.size(); ++i)
        csv << K << ',' << num(fit.magnitudes[i]) << ',' << num(fit.residuals[i]) << ',' << num(fit.slope) << ','
            << num(fit.r2) << '\n';
    }
    for (int K = 1; K <= ps.k_max; ++K) {
      const double drop = slopes[K - 1] - slopes[K];
      std::ostringstream d;
      d << "slope K=" << K - 1 << ": " << slopes[K - 1] << ", K=" << K << ": " << slopes[K];
      add("parametrix_slope_drop_K=" + std::to_string(K), std::abs(drop - ps.slope_step) <= ps.slope_tolerance,
          drop, ps.slope_step, d.str());
    }

    const auto flat = build_parametrix(a1, a0_flat, 1, ps.nodes);
    double bmax = 0.0;
    for (const auto& p : ps.points)
      for (double m : ps.magnitudes) bmax = std::max(bmax, std::abs(flat[1](e0, p.first, p.second, m * ps.eta_direction)));
    add("flat_lower_order_term_vanishes", bmax <= s_.tolerances.vanishing, bmax, s_.tolerances.vanishing,
        "sup |b_-1| for an x-independent lower-order symbol");
  }

  const Scenario& s_;
  RunOptions opt_;
  std::vector<double> eps_;
  Report report_;
  std::string current_;
  CoefficientSet cs_;
  std::shared_ptr<const CharFlow> flow_;
  PhaseAmp phase_;
  ParamFamily u0_;
  ParamFamily control_;
};

}  // namespace

StageError::StageError(const std::string& stage, const std::string& what, std::optional<double> eps)
    : Error([&] {
        std::ostringstream os;
        os << "stage " << stage;
        if (eps) os << " (eps=" << *eps << ")";
        os << ": " << what;
        return os.str();
      }()),
      stage_(stage),
      eps_(eps) {}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* Report::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

Scenario apply_overrides(Scenario s, const RunOptions& opt) {
  if (opt.eps_min || opt.eps_max) {
    const double lo = opt.eps_min.value_or(0.0), hi = opt.eps_max.value_or(1.0);
    if (!(lo > 0.0 && hi <= 1.0 && lo <= hi)) throw ArgumentError("eps range must satisfy 0 < eps_min <= eps_max <= 1");
    s.eps_k_min = static_cast<int>(std::ceil(-std::log2(hi) - 1e-9));
    s.eps_k_max = static_cast<int>(std::floor(-std::log2(lo) + 1e-9));
    if (s.eps_k_max < s.eps_k_min) throw ArgumentError("eps range contains no grid value 2^-k");
  }
  if (opt.grid) {
    for (auto& n : s.grid.n) n = *opt.grid;
  }
  if (opt.tolerance) s.tolerances.ode = *opt.tolerance;
  if (opt.jobs < 1) throw ArgumentError("jobs must be >= 1");
  s.validate();
  return s;
}

Report run_scenario(const Scenario& s, const RunOptions& opt) {
  s.validate();
  return Pipeline(s, opt).run();
}

void write_report_json(std::ostream& os, const Report& r) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["passed"] = r.passed();
  j["seconds"] = r.seconds;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json cj;
    cj["stage"] = c.stage;
    cj["name"] = c.name;
    cj["passed"] = c.passed;
    cj["value"] = std::isfinite(c.value) ? nlohmann::ordered_json(c.value) : nlohmann::ordered_json(num(c.value));
    cj["threshold"] = c.threshold;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    j["checks"].push_back(cj);
  }
  j["artifacts"] = r.artifacts;
  os << j.dump(2) << '\n';
}

FieldSource solution_field(const PhaseAmp& p, std::shared_ptr<const CharFlow> flow, const ParamFamily& u0, double t) {
  return [p, flow, u0, t](double eps, const std::vector<double>& lo, double h, const std::vector<std::size_t>& n) {
    std::size_t total = 1;
    for (auto k : n) total *= k;
    std::vector<std::vector<double>> pts(total, std::vector<double>(lo.size()));
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (std::size_t ax = lo.size(); ax-- > 0;) {
        pts[flat][ax] = lo[ax] + h * static_cast<double>(rem % n[ax]);
        rem /= n[ax];
      }
    }
    const auto feet = flow->gamma_batch(eps, pts, t, 0.0);
    const bool flat_amp = !p.beta || flow->coefficients().a0_time_only();
    const cplx b0 = p.beta ? p.amplitude(eps, t, pts.front()) : cplx(1.0);
    std::vector<cplx> out(total);
    for (std::size_t i = 0; i < total; ++i) {
      const cplx b = flat_amp ? b0 : p.amplitude(eps, t, pts[i]);
      out[i] = b * u0(eps, feet[i]);
    }
    return out;
  };
}

FieldSource spacetime_field(const PhaseAmp& p, std::shared_ptr<const CharFlow> flow, const ParamFamily& u0) {
  if (flow->dimension() != 1) throw ArgumentError("spacetime_field: one space dimension only");
  return [p, flow, u0](double eps, const std::vector<double>& lo, double h, const std::vector<std::size_t>& n) {
    if (lo.size() != 2 || n.size() != 2) throw ArgumentError("spacetime_field: samples live in (t, x)");
    std::vector<cplx> out(n[0] * n[1]);
    const bool translate = flow->coefficients().a1_time_only() && (!p.beta || flow->coefficients().a0_time_only());
    std::vector<std::vector<double>> xs(n[1], std::vector<double>(1));
    for (std::size_t j = 0; j < n[1]; ++j) xs[j][0] = lo[1] + h * static_cast<double>(j);
    for (std::size_t i = 0; i < n[0]; ++i) {
      const double t = lo[0] + h * static_cast<double>(i);
      if (translate) {
        const double x0 = xs.front()[0];
        const double shift = flow->gamma(eps, xs.front(), t, 0.0)[0] - x0;
        const cplx b = p.beta ? p.amplitude(eps, t, xs.front()) : cplx(1.0);
        for (std::size_t j = 0; j < n[1]; ++j) out[i * n[1] + j] = b * u0(eps, xs[j][0] + shift);
      } else {
        const auto feet = flow->gamma_batch(eps, xs, t, 0.0);
        for (std::size_t j = 0; j < n[1]; ++j) {
          const cplx b = p.beta ? p.amplitude(eps, t, xs[j]) : cplx(1.0);
          out[i * n[1] + j] = b * u0(eps, feet[j]);
        }
      }
    }
    return out;
  };
}

std::vector<std::vector<double>> lattice(const std::vector<double>& lo, const std::vector<double>& hi, double cell) {
  if (lo.size() != hi.size() || lo.empty()) throw ArgumentError("lattice: bad box");
  if (!(cell > 0.0)) throw ArgumentError("lattice: cell must be > 0");
  std::vector<std::vector<double>> axes(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i)
    for (long k = static_cast<long>(std::ceil(lo[i] / cell - 1e-9)); static_cast<double>(k) * cell <= hi[i] + 1e-9 * cell;
         ++k)
      axes[i].push_back(static_cast<double>(k) * cell);
  std::vector<std::vector<double>> out{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : out)
      for (double v : axis) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace gfio
