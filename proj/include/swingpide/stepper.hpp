#pragma once

#include "swingpide/discretize.hpp"
#include "swingpide/grid.hpp"
#include "swingpide/linsolve.hpp"
#include "swingpide/model.hpp"

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace swingpide {

struct TimeGridSpec {
  int n_steps = 100;
  double horizon = 1.0;

  void validate() const;
  double dt() const { return horizon / n_steps; }
};

struct FixedPointConfig {
  double tol = 1e-7;
  int l_max = 100;

  void validate() const;
};

struct DirkConfig {
  double theta = 1.0 - 0.70710678118654752440;

  void validate() const;
  bool l_stable() const;
};

class FixedPointError : public std::runtime_error {
 public:
  FixedPointError(int iterations, double last_increment);
  int iterations;
  double last_increment;
};

/// max_k |y_new_k - y_old_k| / max(1, |y_new_k|) < cfg.tol.
bool fp_converged(const Vector& y_new, const Vector& y_old, const FixedPointConfig& cfg);

enum class StepperKind { Slcnfi, Cnfi, Dirkfi };

std::string_view to_string(StepperKind k);
StepperKind parse_stepper(std::string_view name);

/// Per-run counters. One entry of `fp_iterations` per fixed-point loop (two
/// per DIRKFI step, one per half step during Rannacher start-up).
struct StepDiagnostics {
  std::vector<int> fp_iterations;
  int max_solver_iterations = 0;
  long total_solver_iterations = 0;
  double max_solver_residual = 0.0;
  int solver_restarts = 0;
  bool record_increments = false;
  /// ||Y_l - Y_{l-1}||_inf per loop, filled when record_increments is set.
  std::vector<std::vector<double>> increments;

  int max_fp_iterations() const;
  void merge(const StepDiagnostics& other);
};

/// g(t): Dirichlet contribution to dV/dt. An empty function means g = 0.
using SourceFn = std::function<Vector(double)>;

struct StepperOptions {
  FixedPointConfig fp;
  SolverConfig solver;
  DirkConfig dirk;
  bool rannacher = true;
  SourceFn source;
};

/// Marches V through n_steps steps of size horizon / n_steps. The fixed-point
/// history (the V^{n-1} used for the starting iterate) and the Rannacher
/// start-up restart at every call.
class IntervalStepper {
 public:
  virtual ~IntervalStepper() = default;
  virtual Vector march(const Vector& v0, double t0, StepDiagnostics* diag) const = 0;
  Vector march(const Vector& v0, StepDiagnostics* diag = nullptr) const { return march(v0, 0.0, diag); }
  const TimeGridSpec& time_grid() const { return tg_; }

 protected:
  IntervalStepper(const OperatorSet& ops, TimeGridSpec tg, StepperOptions opt);
  const OperatorSet& ops_;
  TimeGridSpec tg_;
  StepperOptions opt_;
};

/// The operator set must outlive the stepper. `grid` and `params` are only
/// used by SLCNFI (departure points).
std::unique_ptr<IntervalStepper> make_stepper(StepperKind kind, const OperatorSet& ops, const Grid2D& grid,
                                              const ModelParams& params, const TimeGridSpec& tg,
                                              const StepperOptions& opt);

struct StepResult {
  Vector values;
  StepDiagnostics diagnostics;
};

StepResult cnfi_interval(const OperatorSet& ops, const Vector& v0, const TimeGridSpec& tg,
                         const FixedPointConfig& fp, bool rannacher, const SolverConfig& solver = {},
                         const SourceFn& source = {});

StepResult dirkfi_interval(const OperatorSet& ops, const Vector& v0, const TimeGridSpec& tg,
                           const FixedPointConfig& fp, const DirkConfig& dc, const SolverConfig& solver = {},
                           const SourceFn& source = {});

StepResult slcnfi_interval(const OperatorSet& ops, const Grid2D& grid, const ModelParams& params, const Vector& v0,
                           const TimeGridSpec& tg, const FixedPointConfig& fp);

/// Everything needed to price on the sinh grid with linear boundary
/// conditions.
struct PricingSetup {
  ModelParams params;
  Domain domain;
  double strike = 50.0;
  int m1 = 100;
  int m2 = 100;
  double d = 0.0;  ///< stretching, <= 0 selects K / 5
  ConvectionScheme convection = ConvectionScheme::Quick;
  StepperKind stepper = StepperKind::Cnfi;
  bool tail_correction = true;
  StepperOptions options;
};

struct EuropeanResult {
  Grid2D grid;
  Vector values;
  StepDiagnostics diagnostics;
};

/// European call max(x + y - K, 0), cell-averaged initial vector, marched to
/// reversed time `maturity` in `n_steps` steps.
EuropeanResult price_european(const PricingSetup& setup, double maturity, int n_steps);

}  // namespace swingpide
