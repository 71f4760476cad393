#include "swingpide/analysis.hpp"
#include "swingpide/config.hpp"
#include "swingpide/spline.hpp"
#include "swingpide/swing.hpp"

#include "operator_checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

using namespace swingpide;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::ostringstream summary;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      summary << " [failed: " << what << "]";
    }
  }
};

int finish(const std::string& id, Verdict& v, double secs) {
  std::printf("CRITERION %s: %s (%.1f s)%s\n", id.c_str(), v.pass ? "PASS" : "FAIL", secs, v.summary.str().c_str());
  return v.pass ? 0 : 1;
}

PricingSetup setup_for(int id, int m, StepperKind kind = StepperKind::Cnfi) {
  RunConfig cfg = default_config(id);
  cfg.m1 = cfg.m2 = m;
  cfg.scheme = kind;
  return to_setup(cfg);
}

SplineSurface surface_of(const Grid2D& g, const Vector& v) {
  return SplineSurface(g.xs, g.ys, Eigen::Map<const RowMatrix>(v.data(), g.nx(), g.ny()));
}

// ------------------------------------------------------------ 1

int operators() {
  const auto t0 = Clock::now();
  Verdict v;
  const Preset s1 = preset(1);
  for (int m : {40, 80, 160}) {
    const Grid2D g = make_sinh_grid(s1.domain, m, m, s1.strike);
    for (auto scheme : {ConvectionScheme::Upwind2, ConvectionScheme::Quick}) {
      const std::pair<Vector, Vector> axes[2] = {{g.xs, oracle::x_coefficients_of(g, s1.params)},
                                                 {g.ys, oracle::y_coefficients_of(g, s1.params)}};
      for (int a = 0; a < 2; ++a) {
        const auto e = oracle::convection_exactness(axes[a].first, axes[a].second, scheme);
        std::printf("  m=%d %s %s: constant %.2e linear %.2e quadratic %.2e over %d rows\n", m,
                    std::string(to_string(scheme)).c_str(), a ? "y" : "x", e.constant, e.linear, e.quadratic,
                    e.quadratic_rows);
        const std::string tag = "m=" + std::to_string(m) + " " + std::string(to_string(scheme)) + (a ? " y" : " x");
        v.require(e.constant < 1e-12, tag + " constant");
        v.require(e.linear < 1e-12, tag + " linear");
        v.require(e.quadratic < 1e-11 && e.quadratic_rows > m / 4, tag + " quadratic");
      }
    }
  }
  for (int id : {1, 4}) {
    const Preset ps = preset(id);
    std::vector<std::pair<double, double>> err;
    for (int m2 : {50, 100, 200, 400}) {
      err.emplace_back(m2, oracle::jump_action_error(make_sinh_grid(ps.domain, 4, m2, ps.strike), ps.params));
      std::printf("  jump set %d m2=%d: error %.3e\n", id, m2, err.back().second);
    }
    const double order = oracle::observed_order(err);
    std::printf("  jump set %d order %.3f\n", id, order);
    v.require(std::abs(order - 2.0) <= 0.25, "jump order set " + std::to_string(id));
  }
  const double secs = seconds_since(t0);
  v.require(secs < 60.0, "runtime");
  return finish("1", v, secs);
}

// ------------------------------------------------------------ 2

int theory() {
  const auto t0 = Clock::now();
  Verdict v;
  const TheorySuiteReport r = theory_suite(default_config(1).seed);
  int failures = 0;
  for (const auto& c : r.all())
    if (c.applicable && !c.pass) {
      ++failures;
      std::printf("  %s\n", c.describe().c_str());
    }
  std::printf("  jump norm checks %zu, convection log-norm checks %zu, operator log-norm checks %zu\n",
              r.jump_norms.size(), r.convection_lognorms.size(), r.operator_lognorms.size());
  std::printf("  growth checks %zu over %ld sample points, failures %d\n", r.growth.size(), r.growth_samples, failures);
  for (const auto& c : r.operator_lognorms) std::printf("  %s\n", c.describe().c_str());
  v.require(r.jump_norms.size() == 12, "jump norm count");
  v.require(r.convection_lognorms.size() == 4 * 3 * 20, "convection sample count");
  v.require(r.operator_lognorms.size() == 4, "operator log-norm count");
  v.require(r.growth_samples >= 4 * 80000L, "growth sample count");
  bool all_applicable = true;
  for (const auto& c : r.jump_norms) all_applicable = all_applicable && c.applicable;
  for (const auto& c : r.convection_lognorms) all_applicable = all_applicable && c.applicable;
  for (const auto& c : r.operator_lognorms) all_applicable = all_applicable && c.applicable;
  v.require(all_applicable, "every bound applicable");
  v.require(failures == 0, std::to_string(failures) + " violated bounds");
  const double secs = seconds_since(t0);
  v.require(secs < 120.0, "runtime");
  return finish("2", v, secs);
}

// ------------------------------------------------------------ 3

int contraction() {
  const auto t0 = Clock::now();
  Verdict v;
  const Preset s1 = preset(1);
  const Grid2D g = make_uniform_dirichlet_grid(s1.domain, 50, 50, s1.strike);
  const ContractionReport rep =
      contraction_check(g, s1.params, s1.strike, ConvectionScheme::Quick, BoundaryKind::Dirichlet, {100, 0.1});
  std::printf("  %s over %d steps (%d ratios, at most %d iterations)\n", rep.check.describe().c_str(), rep.steps,
              rep.ratios_counted, rep.max_iterations);
  v.require(rep.check.applicable, "hypothesis C^ dt < 2");
  v.require(rep.check.pass, "increment ratio above Theta");
  v.require(rep.steps == 100 && rep.ratios_counted > 0, "step count");

  for (int id = 1; id <= 6; ++id) {
    const EuropeanResult r = price_european(setup_for(id, 50), 0.1, 100);
    const int worst = r.diagnostics.max_fp_iterations();
    std::printf("  set %d T=0.1 N=100: at most %d fixed-point iterations per loop\n", id, worst);
    v.require(worst <= 10, "set " + std::to_string(id) + " iterations");
  }
  // ten times the step: convergence is required, the count is only reported
  for (int id = 1; id <= 6; ++id) {
    const EuropeanResult r = price_european(setup_for(id, 50), 1.0, 100);
    std::printf("  set %d T=1 N=100: converged, at most %d fixed-point iterations per loop\n", id,
                r.diagnostics.max_fp_iterations());
  }
  const double secs = seconds_since(t0);
  v.require(secs < 120.0, "runtime");
  return finish("3", v, secs);
}

// ------------------------------------------------------------ 4

int temporal() {
  const auto t0 = Clock::now();
  Verdict v;
  const std::vector<int> ns{100, 200, 400, 800};
  for (int id : {1, 4}) {
    const auto reports =
        temporal_study(setup_for(id, 100), 0.1, 100, ns, 4000, {StepperKind::Cnfi, StepperKind::Dirkfi});
    for (const auto& r : reports) {
      std::printf("  set %d %s:", id, std::string(to_string(r.scheme)).c_str());
      for (const auto& s : r.samples) std::printf(" N=%d %.3e", s.n_steps, s.error);
      std::printf(" order %.3f (R^2 %.4f)\n", r.fit.order, r.fit.r_squared);
      v.require(r.fit.valid && r.fit.order >= 1.8 && r.fit.order <= 2.2,
                "set " + std::to_string(id) + " " + std::string(to_string(r.scheme)) + " order");
    }
    for (std::size_t k = 0; k < ns.size(); ++k)
      v.require(reports[1].samples[k].error <= reports[0].samples[k].error,
                "set " + std::to_string(id) + " dirkfi above cnfi at N=" + std::to_string(ns[k]));
  }
  const double secs = seconds_since(t0);
  v.require(secs < 15 * 60.0, "runtime");
  return finish("4", v, secs);
}

// ------------------------------------------------------------ 5

int total() {
  const auto t0 = Clock::now();
  Verdict v;
  std::vector<int> ms;
  for (int m = 50; m <= 250; m += 25) ms.push_back(m);
  const auto n_of_m = [](int m) { return (m + 1) / 2; };
  for (int id : {1, 3, 4}) {
    PricingSetup ref_setup = setup_for(id, 500);
    const EuropeanResult ref = price_european(ref_setup, 0.1, 500);
    const auto reports = total_study(setup_for(id, 50), 0.1, ms, n_of_m, ref,
                                     {StepperKind::Slcnfi, StepperKind::Cnfi, StepperKind::Dirkfi});
    for (const auto& r : reports) {
      const bool sl = r.scheme == StepperKind::Slcnfi;
      const double lo = (id == 3 && !sl) ? 1.4 : 1.7, hi = (id == 3 && !sl) ? 1.9 : 2.3;
      std::printf("  set %d %s:", id, std::string(to_string(r.scheme)).c_str());
      for (const auto& s : r.samples) std::printf(" m=%d %.3e", s.m, s.error);
      std::printf(" order %.3f (R^2 %.4f, band [%.1f, %.1f])\n", r.fit.order, r.fit.r_squared, lo, hi);
      v.require(r.fit.valid && r.fit.order >= lo && r.fit.order <= hi,
                "set " + std::to_string(id) + " " + std::string(to_string(r.scheme)) + " order");
    }
  }
  const double secs = seconds_since(t0);
  v.require(secs < 30 * 60.0, "runtime");
  return finish("5", v, secs);
}

// ------------------------------------------------------------ 6

struct Table {
  int id;
  double values[3][3];  // rows y = 5, -100, 100; columns x = 40, 60, 80
};

constexpr double kY[3] = {5.0, -100.0, 100.0};
constexpr double kX[3] = {40.0, 60.0, 80.0};
constexpr Table kTables[2] = {
    {1, {{500.8962, 512.5631, 527.9123}, {500.8664, 512.5167, 527.8260}, {500.9234, 512.6054, 527.9915}}},
    {4, {{686.5660, 699.2691, 714.7266}, {686.5246, 699.2137, 714.6424}, {686.6036, 699.3196, 714.8036}}},
};

SwingResult run_swing(int id, int m, int steps, const SwingContract& c, bool keep_policy,
                      const std::function<void(int, bool, const SwingState&)>& observer = {}) {
  SwingOptions opt;
  opt.steps_per_interval = steps;
  opt.prune_unreachable = !observer;
  opt.keep_policy = keep_policy;
  opt.observer = observer;
  return price_swing(setup_for(id, m), c, opt);
}

int swing_values() {
  const auto t0 = Clock::now();
  Verdict v;
  const SwingContract c = default_config(1).contract;
  for (const Table& t : kTables) {
    const SwingResult r100 = run_swing(t.id, 100, 100, c, false);
    const SwingResult r150 = run_swing(t.id, 150, 150, c, false);
    const SplineSurface s100 = surface_of(r100.grid, r100.value()), s150 = surface_of(r150.grid, r150.value());
    double worst_ref = 0.0, worst_richardson = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double got = s100(kX[b], kY[a]), fine = s150(kX[b], kY[a]), want = t.values[a][b];
        const double rel = std::abs(got - want) / want, rich = std::abs(fine - got) / std::abs(fine);
        worst_ref = std::max(worst_ref, rel);
        worst_richardson = std::max(worst_richardson, rich);
        std::printf("  set %d (x=%g, y=%g): m=100 %.4f m=150 %.4f reference %.4f (rel %.2e)\n", t.id, kX[b], kY[a],
                    got, fine, want, rel);
      }
    std::printf("  set %d: worst deviation from the table %.3e, m=100 vs m=150 %.3e\n", t.id, worst_ref,
                worst_richardson);
    v.require(worst_ref < 0.01, "set " + std::to_string(t.id) + " table values");
    v.require(worst_richardson < 0.005, "set " + std::to_string(t.id) + " refinement consistency");
  }
  const double secs = seconds_since(t0);
  v.require(secs < 45 * 60.0, "runtime");
  return finish("6", v, secs);
}

// Structural invariants at every action time of a small run: level
// monotonicity after every update and march, nonnegative values after each
// update, level M identically zero, feasible policies and paths, and
// dominance over the European call marched alongside on the same scheme.
void structural_checks(int id, Verdict& v) {
  SwingContract c = default_config(id).contract;
  c.n_actions = 4;
  c.global_cap = 2;
  const int m = 50, steps = 50;
  const PricingSetup s = setup_for(id, m);
  const Grid2D g = make_sinh_grid(s.domain, m, m, s.strike, s.d);
  const OperatorSet ops = assemble(g, s.params, s.convection, BoundaryKind::Linear, s.tail_correction);
  const auto stepper = make_stepper(s.stepper, ops, g, s.params, {steps, c.action_spacing()}, s.options);
  Vector european = nodal_payoff(g, s.strike);

  double worst_monotone = 0.0, worst_sign = 0.0, worst_dominance = 0.0, worst_top = 0.0;
  int observed = 0;
  const auto observer = [&](int, bool after_march, const SwingState& st) {
    ++observed;
    for (int l = 0; l < c.global_cap; ++l)
      worst_monotone = std::min(worst_monotone, (st.values[l] - st.values[l + 1]).minCoeff());
    worst_top = std::max(worst_top, st.values[c.global_cap].cwiseAbs().maxCoeff());
    if (!after_march) {
      for (const Vector& x : st.values) worst_sign = std::min(worst_sign, x.minCoeff());
    } else {
      european = stepper->march(european, st.tau - c.action_spacing(), nullptr);
      worst_dominance = std::min(worst_dominance, (st.values[0] - european).minCoeff());
    }
  };
  const SwingResult r = run_swing(id, m, steps, c, true, observer);
  const EuropeanResult eu = price_european(s, c.maturity, c.n_actions * steps);
  const double final_dominance = (r.value() - eu.values).minCoeff();

  int bad_policy = 0, bad_path = 0;
  for (int n = 1; n <= c.n_actions; ++n)
    for (int l = 0; l < c.global_cap; ++l)
      for (Eigen::Index k = 0; k < g.size(); ++k)
        if (r.policy.at(n, l, k) > std::min(c.local_cap, c.global_cap - l)) ++bad_policy;
  const auto path = optimal_path(r.policy, c);
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    int prev = 0;
    for (int n = 0; n < c.n_actions; ++n) {
      const int inc = path[n][k] - prev;
      if (inc < 0 || inc > c.local_cap) ++bad_path;
      prev = path[n][k];
    }
    if (prev > c.global_cap) ++bad_path;
  }
  std::printf(
      "  set %d: %d snapshots; min level gap %.2e, min value after update %.2e, max |v_M| %.1e, "
      "min swing - european %.2e (cell-averaged european at T: %.2e), bad policy entries %d, bad paths %d\n",
      id, observed, worst_monotone, worst_sign, worst_top, worst_dominance, final_dominance, bad_policy, bad_path);
  const std::string tag = "set " + std::to_string(id) + " ";
  v.require(observed == 2 * c.n_actions, tag + "snapshots");
  v.require(worst_monotone >= -1e-9, tag + "z-monotonicity");
  v.require(worst_sign >= 0.0 && worst_top == 0.0, tag + "value signs");
  v.require(worst_dominance >= -1e-9 && final_dominance >= -1e-9, tag + "european dominance");
  v.require(bad_policy == 0 && bad_path == 0, tag + "path feasibility");
  v.require(std::isfinite(r.value().sum()), tag + "finite values");
}

int swing_smoke(const std::string& id) {
  const auto t0 = Clock::now();
  Verdict v;
  for (int set : {1, 4}) structural_checks(set, v);
  const double secs = seconds_since(t0);
  v.require(secs < 180.0, "runtime");
  return finish(id, v, secs);
}

// ------------------------------------------------------------ 7

int monte_carlo() {
  const auto t0 = Clock::now();
  Verdict v;
  const RunConfig cfg = default_config(1);
  const EuropeanResult r = price_european(setup_for(1, 200, StepperKind::Dirkfi), 0.1, 500);
  const SplineSurface surf = surface_of(r.grid, r.values);
  const std::pair<double, double> pts[] = {{40.0, 5.0}, {80.0, 0.0}, {100.0, 50.0}};
  for (std::size_t k = 0; k < std::size(pts); ++k) {
    const auto [x, y] = pts[k];
    const McEstimate mc = mc_oracle_european(cfg.params, cfg.contract.strike, 0.1, x, y, 1000000, cfg.seed + k);
    const double pide = surf(x, y), z = (pide - mc.price) / mc.std_error;
    std::printf("  (x=%g, y=%g): PIDE %.6f MC %.6f +- %.6f, z = %.3f\n", x, y, pide, mc.price, mc.std_error, z);
    v.require(std::abs(z) <= 3.0, "point " + std::to_string(k + 1));
  }
  const double secs = seconds_since(t0);
  v.require(secs < 600.0, "runtime");
  return finish("7", v, secs);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <1-8 | 6-smoke>\n", argv[0]);
    return 2;
  }
  const std::string which = argv[1];
  try {
    if (which == "1") return operators();
    if (which == "2") return theory();
    if (which == "3") return contraction();
    if (which == "4") return temporal();
    if (which == "5") return total();
    if (which == "6") return swing_values();
    if (which == "6-smoke") return swing_smoke("6-smoke");
    if (which == "7") return monte_carlo();
    if (which == "8") return swing_smoke("8");
  } catch (const std::exception& e) {
    std::printf("CRITERION %s: FAIL [error: %s]\n", which.c_str(), e.what());
    return 1;
  }
  std::fprintf(stderr, "unknown criterion '%s'\n", which.c_str());
  return 2;
}
