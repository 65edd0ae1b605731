// gfio: run, list and validate scenario files.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "gfio/runner.hpp"
#include "gfio/scenario.hpp"

namespace {

constexpr int kChecksFailed = 1;
constexpr int kError = 2;

int cmd_list() {
  const auto all = gfio::list_scenarios();
  if (all.empty()) {
    std::cerr << "no scenarios found in " << gfio::builtin_scenario_dir() << "\n";
    return kError;
  }
  std::size_t width = 0;
  for (const auto& s : all) width = std::max(width, s.name.size());
  for (const auto& s : all) std::printf("%-*s  %s\n", static_cast<int>(width), s.name.c_str(), s.description.c_str());
  return 0;
}

int cmd_validate(const std::string& file) {
  const auto s = gfio::load_scenario(file);
  std::printf("ok: %s (dimension %zu)\n", s.name.c_str(), s.dimension);
  return 0;
}

int cmd_run(const std::string& target, gfio::RunOptions opt) {
  const auto s = gfio::apply_overrides(gfio::resolve_scenario(target), opt);
  if (opt.out_dir.empty()) opt.out_dir = (std::filesystem::path("gfio_out") / s.name).string();
  std::printf("scenario %s -> %s\n", s.name.c_str(), opt.out_dir.c_str());
  const auto r = gfio::run_scenario(s, opt);
  for (const auto& c : r.checks)
    std::printf("%s  %-14s %-34s value=%.6g threshold=%.6g%s%s\n", c.passed ? "PASS" : "FAIL", c.stage.c_str(),
                c.name.c_str(), c.value, c.threshold, c.detail.empty() ? "" : "  ", c.detail.c_str());
  std::printf("%s: %s in %.2f s\n", s.name.c_str(), r.passed() ? "all checks passed" : "checks FAILED", r.seconds);
  return r.passed() ? 0 : kChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized FIO solver: scenario runner"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List built-in scenarios");

  std::string file;
  auto* validate = app.add_subcommand("validate", "Check a scenario file against the schema");
  validate->add_option("file", file, "Scenario file")->required();

  std::string target;
  gfio::RunOptions opt;
  double eps_min = 0.0, eps_max = 0.0, tolerance = 0.0;
  std::size_t grid = 0;
  auto* run = app.add_subcommand("run", "Run a scenario file or built-in by name");
  run->add_option("scenario", target, "Scenario file or built-in name")->required();
  run->add_option("--out-dir", opt.out_dir, "Output directory (default gfio_out/<name>)");
  auto* o_emin = run->add_option("--eps-min", eps_min, "Smallest eps kept from the grid")->check(CLI::PositiveNumber);
  auto* o_emax = run->add_option("--eps-max", eps_max, "Largest eps kept from the grid")->check(CLI::PositiveNumber);
  auto* o_grid = run->add_option("--grid", grid, "Grid points per axis (power of two)");
  auto* o_tol = run->add_option("--tolerance", tolerance, "ODE tolerance")->check(CLI::PositiveNumber);
  run->add_option("--jobs", opt.jobs, "Worker threads within a stage")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) return cmd_list();
    if (*validate) return cmd_validate(file);
    if (*o_emin) opt.eps_min = eps_min;
    if (*o_emax) opt.eps_max = eps_max;
    if (*o_grid) opt.grid = grid;
    if (*o_tol) opt.tolerance = tolerance;
    return cmd_run(target, opt);
  } catch (const gfio::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}
