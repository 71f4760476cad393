#include "swingpide/analysis.hpp"
#include "swingpide/config.hpp"
#include "swingpide/csv.hpp"
#include "swingpide/spline.hpp"
#include "swingpide/stepper.hpp"
#include "swingpide/swing.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace swingpide;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<int> preset;
  std::optional<int> m;
  std::optional<int> n_steps;
  std::optional<std::string> scheme;
  std::optional<std::string> convection;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> actions;
  std::optional<int> local_cap;
  std::optional<int> global_cap;
  std::optional<double> strike;
  std::optional<double> maturity;
  std::optional<long> mc_paths;
};

RunConfig resolve(const Overrides& o) {
  RunConfig c;
  if (!o.config_path.empty()) {
    std::ifstream f(o.config_path);
    if (!f) throw std::runtime_error("cannot read config file " + o.config_path);
    std::stringstream ss;
    ss << f.rdbuf();
    c = parse_config(ss.str());
  } else {
    c = default_config(o.preset.value_or(1));
  }
  if (o.preset && !o.config_path.empty()) {
    // --preset on top of a file replaces the model and domain only
    const Preset p = preset(*o.preset);
    c.preset = p.id;
    c.params = p.params;
    c.domain = p.domain;
  }
  if (o.m) c.m1 = c.m2 = *o.m;
  if (o.n_steps) c.n_steps = *o.n_steps;
  if (o.scheme) c.scheme = parse_stepper(*o.scheme);
  if (o.convection) c.convection = parse_convection(*o.convection);
  if (o.out) c.out = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.actions) c.contract.n_actions = *o.actions;
  if (o.local_cap) c.contract.local_cap = *o.local_cap;
  if (o.global_cap) c.contract.global_cap = *o.global_cap;
  if (o.strike) c.contract.strike = *o.strike;
  if (o.maturity) c.contract.maturity = *o.maturity;
  if (o.mc_paths) c.mc_paths = *o.mc_paths;
  c.validate();
  return c;
}

std::vector<CsvRow> surface_rows(const Grid2D& g, const Vector& v) {
  std::vector<CsvRow> rows;
  rows.reserve(static_cast<std::size_t>(g.size()));
  for (Eigen::Index i = 0; i < g.nx(); ++i)
    for (Eigen::Index j = 0; j < g.ny(); ++j) rows.push_back({g.xs[i], g.ys[j], v[g.index(i, j)]});
  return rows;
}

SplineSurface surface_of(const Grid2D& g, const Vector& v) {
  return SplineSurface(g.xs, g.ys, Eigen::Map<const RowMatrix>(v.data(), g.nx(), g.ny()));
}

void print_diagnostics(const StepDiagnostics& d) {
  std::cout << "fixed-point iterations (max per step): " << d.max_fp_iterations() << "\n"
            << "BiCGSTAB iterations (max / total): " << d.max_solver_iterations << " / "
            << d.total_solver_iterations << "\n";
  if (d.solver_restarts) std::cout << "BiCGSTAB restarts: " << d.solver_restarts << "\n";
}

int run_european(const RunConfig& c) {
  PricingSetup s = to_setup(c);
  const EuropeanResult r = price_european(s, c.contract.maturity, c.n_steps);
  const fs::path path = fs::path(c.out) / "european_surface.csv";
  write_csv(path, config_hash(c), {"x", "y", "value"}, surface_rows(r.grid, r.values));
  print_diagnostics(r.diagnostics);
  std::cout << "wrote " << path.string() << " (" << r.grid.size() << " rows)\n";
  return 0;
}

struct SwingFlags {
  bool full_levels = false;
};

int run_swing(const RunConfig& c, const SwingFlags& f) {
  PricingSetup s = to_setup(c);
  SwingOptions opt;
  opt.steps_per_interval = c.n_steps;
  opt.prune_unreachable = !f.full_levels;
  const SwingResult r = price_swing(s, c.contract, opt);
  const std::uint64_t h = config_hash(c);
  const fs::path dir(c.out);

  const SplineSurface surf = surface_of(r.grid, r.value());
  std::vector<CsvRow> points;
  std::cout << "value at z = 0\n";
  for (double y : {5.0, -100.0, 100.0}) {
    std::cout << "  y = " << std::setw(4) << y << ":";
    for (double x : {40.0, 60.0, 80.0}) {
      const double v = surf(x, y);
      points.push_back({x, y, v});
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(4) << v;
      std::cout << "  x = " << x << ": " << cell.str();
    }
    std::cout << "\n";
  }
  write_csv(dir / "swing_points.csv", h, {"x", "y", "value"}, points);
  write_csv(dir / "swing_surface.csv", h, {"x", "y", "value"}, surface_rows(r.grid, r.value()));

  std::vector<CsvRow> paths;
  if (r.policy.n_actions() > 0) {
    const auto cum = optimal_path(r.policy, c.contract);
    for (Eigen::Index i = 0; i < r.grid.nx(); ++i)
      for (Eigen::Index j = 0; j < r.grid.ny(); ++j) {
        const Eigen::Index k = r.grid.index(i, j);
        if (!r.grid.roi_mask[static_cast<std::size_t>(k)]) continue;
        for (int n = 1; n <= c.contract.n_actions; ++n)
          paths.push_back({r.grid.xs[i], r.grid.ys[j], static_cast<long long>(n),
                           static_cast<long long>(cum[n - 1][k])});
      }
  }
  write_csv(dir / "swing_paths.csv", h, {"x", "y", "action", "cumulative_units"}, paths);
  print_diagnostics(r.diagnostics);
  std::cout << "wrote swing_points.csv, swing_surface.csv, swing_paths.csv to " << dir.string() << "\n";
  return 0;
}

struct ConvergenceFlags {
  std::string study = "both";
  std::vector<int> m_values{50, 75, 100, 125, 150, 175, 200, 225, 250};
  int m_reference = 500;
  std::vector<int> n_values{100, 200, 400, 800};
  int n_reference = 4000;
  std::vector<std::string> schemes{"slcnfi", "cnfi", "dirkfi"};
};

void write_reports(const fs::path& path, std::uint64_t h, const std::vector<ErrorReport>& reps) {
  std::vector<CsvRow> rows;
  for (const auto& r : reps)
    for (const auto& s : r.samples)
      rows.push_back({std::string(to_string(r.scheme)), static_cast<long long>(s.m),
                      static_cast<long long>(s.n_steps), s.error, s.seconds});
  write_csv(path, h, {"scheme", "m", "N", "error", "seconds"}, rows);
  for (const auto& r : reps)
    std::cout << "  " << to_string(r.scheme) << ": order " << r.fit.order << " (R^2 " << r.fit.r_squared
              << (r.fit.valid ? "" : ", fit not valid") << ")\n";
}

int run_convergence(const RunConfig& c, const ConvergenceFlags& f) {
  const PricingSetup s = to_setup(c);
  const std::uint64_t h = config_hash(c);
  const fs::path dir(c.out);
  std::vector<StepperKind> kinds;
  for (const auto& name : f.schemes) kinds.push_back(parse_stepper(name));
  const double t = c.contract.maturity;

  if (f.study == "total" || f.study == "both") {
    auto reps = total_study(s, t, f.m_values, [](int m) { return (m + 1) / 2; }, f.m_reference, f.m_reference, kinds);
    std::cout << "total error, reference m = N = " << f.m_reference << "\n";
    write_reports(dir / "convergence_total.csv", h, reps);
  }
  if (f.study == "temporal" || f.study == "both") {
    std::vector<StepperKind> implicit;
    for (StepperKind k : kinds)
      if (k != StepperKind::Slcnfi) implicit.push_back(k);
    auto reps = temporal_study(s, t, c.m1, f.n_values, f.n_reference, implicit);
    std::cout << "temporal error, m = " << c.m1 << ", reference N = " << f.n_reference << "\n";
    write_reports(dir / "convergence_temporal.csv", h, reps);
  }
  return 0;
}

int run_verify_theory(const RunConfig& c) {
  const TheorySuiteReport rep = theory_suite(c.seed);
  std::vector<CsvRow> rows;
  int failures = 0;
  for (const auto& chk : rep.all()) {
    rows.push_back({chk.name, chk.bound, chk.observed, static_cast<long long>(chk.applicable),
                    static_cast<long long>(chk.pass)});
    if (!chk.pass) {
      ++failures;
      std::cout << chk.describe() << "\n";
    }
  }
  write_csv(fs::path(c.out) / "theory_report.csv", config_hash(c), {"check", "bound", "observed", "applicable", "pass"},
            rows);
  std::cout << rows.size() << " checks, " << failures << " failed, " << rep.growth_samples
            << " growth-function samples\n";
  return failures ? 1 : 0;
}

int run_mc_check(const RunConfig& c, double z_limit) {
  const PricingSetup s = to_setup(c);
  const EuropeanResult r = price_european(s, c.contract.maturity, c.n_steps);
  const SplineSurface surf = surface_of(r.grid, r.values);
  std::vector<CsvRow> rows;
  bool ok = true;
  const std::pair<double, double> pts[] = {{40.0, 5.0}, {80.0, 0.0}, {100.0, 50.0}};
  for (std::size_t k = 0; k < std::size(pts); ++k) {
    const auto [x, y] = pts[k];
    const double pide = surf(x, y);
    const McEstimate mc =
        mc_oracle_european(c.params, c.contract.strike, c.contract.maturity, x, y, c.mc_paths, c.seed + k);
    const double z = (pide - mc.price) / mc.std_error;
    ok = ok && std::abs(z) <= z_limit;
    rows.push_back({x, y, pide, mc.price, mc.std_error, z});
    std::cout << "(" << x << ", " << y << "): pide " << pide << "  mc " << mc.price << " +- " << mc.std_error
              << "  z " << z << "\n";
  }
  write_csv(fs::path(c.out) / "mc_check.csv", config_hash(c), {"x", "y", "pide", "mc", "std_error", "z"}, rows);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swing-option PIDE pricer for a two-factor mean-reverting jump model"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--preset", o.preset, "built-in parameter set 1-6");
  app.add_option("--m", o.m, "grid intervals per axis (m1 = m2 = m)");
  app.add_option("--n-steps", o.n_steps, "time steps (per action interval for swing)");
  app.add_option("--scheme", o.scheme, "slcnfi, cnfi or dirkfi");
  app.add_option("--convection", o.convection, "upwind2 or quick");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--actions", o.actions, "number of action times N_a");
  app.add_option("--local-cap", o.local_cap, "units per action L");
  app.add_option("--global-cap", o.global_cap, "total units M");
  app.add_option("--strike", o.strike, "strike K");
  app.add_option("--maturity", o.maturity, "maturity T in years");
  app.add_option("--mc-paths", o.mc_paths, "Monte Carlo paths");

  auto* eur = app.add_subcommand("european", "price a European call on the full grid");
  SwingFlags sf;
  auto* sw = app.add_subcommand("swing", "price the swing contract");
  sw->add_flag("--full-levels", sf.full_levels, "march every volume level, including unreachable ones");
  ConvergenceFlags cf;
  auto* conv = app.add_subcommand("convergence", "total and temporal error studies for the European call");
  conv->add_option("--study", cf.study, "total, temporal or both")
      ->check(CLI::IsMember({"total", "temporal", "both"}))
      ->capture_default_str();
  conv->add_option("--m-values", cf.m_values, "grid sizes for the total-error study")->capture_default_str();
  conv->add_option("--m-reference", cf.m_reference, "reference m = N for the total-error study")
      ->capture_default_str();
  conv->add_option("--n-values", cf.n_values, "step counts for the temporal study")->capture_default_str();
  conv->add_option("--n-reference", cf.n_reference, "reference step count for the temporal study")
      ->capture_default_str();
  conv->add_option("--schemes", cf.schemes, "time-stepping schemes to study")->capture_default_str();
  auto* theory = app.add_subcommand("verify-theory", "run the norm, log-norm, contraction and stability checks");
  double z_limit = 3.0;
  auto* mc = app.add_subcommand("mc-check", "compare European prices against Monte Carlo");
  mc->add_option("--z-limit", z_limit, "largest accepted |z| score")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  try {
    cfg = resolve(o);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }
  try {
    if (*eur) return run_european(cfg);
    if (*sw) return run_swing(cfg, sf);
    if (*conv) return run_convergence(cfg, cf);
    if (*theory) return run_verify_theory(cfg);
    if (*mc) return run_mc_check(cfg, z_limit);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
