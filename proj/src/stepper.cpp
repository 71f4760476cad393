#include "swingpide/stepper.hpp"

#include "swingpide/spline.hpp"

#include <algorithm>
#include <cmath>

namespace swingpide {

void TimeGridSpec::validate() const {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("time horizon must be positive");
}

void FixedPointConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("fixed-point tolerance must be positive");
  if (l_max < 1) throw std::invalid_argument("fixed-point l_max must be at least 1");
}

void DirkConfig::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("DIRK theta must lie in (0, 1)");
}

bool DirkConfig::l_stable() const {
  const double r = 0.70710678118654752440;
  return std::abs(theta - (1.0 - r)) <= 1e-12 || std::abs(theta - (1.0 + r)) <= 1e-12;
}

FixedPointError::FixedPointError(int its, double inc)
    : std::runtime_error("fixed-point iteration did not converge within " + std::to_string(its) +
                         " iterations (last increment " + std::to_string(inc) + ")"),
      iterations(its),
      last_increment(inc) {}

bool fp_converged(const Vector& y_new, const Vector& y_old, const FixedPointConfig& cfg) {
  if (y_new.size() != y_old.size()) throw std::invalid_argument("fp_converged: size mismatch");
  const double worst =
      ((y_new - y_old).array().abs() / y_new.array().abs().max(1.0)).maxCoeff();
  return worst < cfg.tol;
}

std::string_view to_string(StepperKind k) {
  switch (k) {
    case StepperKind::Slcnfi: return "slcnfi";
    case StepperKind::Cnfi: return "cnfi";
    case StepperKind::Dirkfi: return "dirkfi";
  }
  return "unknown";
}

StepperKind parse_stepper(std::string_view name) {
  if (name == "slcnfi") return StepperKind::Slcnfi;
  if (name == "cnfi") return StepperKind::Cnfi;
  if (name == "dirkfi") return StepperKind::Dirkfi;
  throw std::invalid_argument("unknown stepper: " + std::string(name));
}

int StepDiagnostics::max_fp_iterations() const {
  return fp_iterations.empty() ? 0 : *std::max_element(fp_iterations.begin(), fp_iterations.end());
}

void StepDiagnostics::merge(const StepDiagnostics& o) {
  fp_iterations.insert(fp_iterations.end(), o.fp_iterations.begin(), o.fp_iterations.end());
  max_solver_iterations = std::max(max_solver_iterations, o.max_solver_iterations);
  total_solver_iterations += o.total_solver_iterations;
  max_solver_residual = std::max(max_solver_residual, o.max_solver_residual);
  solver_restarts += o.solver_restarts;
  increments.insert(increments.end(), o.increments.begin(), o.increments.end());
}

IntervalStepper::IntervalStepper(const OperatorSet& ops, TimeGridSpec tg, StepperOptions opt)
    : ops_(ops), tg_(tg), opt_(std::move(opt)) {
  tg_.validate();
  opt_.fp.validate();
  opt_.solver.validate();
  opt_.dirk.validate();
}

namespace {

SparseMatrix shifted_identity(const SparseMatrix& a, double c) {
  SparseMatrix eye(a.rows(), a.cols());
  eye.setIdentity();
  SparseMatrix m = eye - c * a;
  m.makeCompressed();
  return m;
}

// Fixed-point loop solve(Y_l) = base + c * B Y_{l-1}. On entry y, by hold the
// starting iterate and its jump image; on exit the converged iterate and B
// applied to it.
template <class Solve>
void fixed_point(const OperatorSet& ops, const Vector& base, double c, Vector& y, Vector& by, Solve&& solve,
                 const FixedPointConfig& fp, StepDiagnostics* diag) {
  std::vector<double>* inc = nullptr;
  if (diag && diag->record_increments) inc = &diag->increments.emplace_back();
  const bool coupled = ops.lambda != 0.0;
  double last = 0.0;
  for (int l = 1; l <= fp.l_max; ++l) {
    Vector y_new = solve(base + c * by, y);
    const bool done = !coupled || fp_converged(y_new, y, fp);
    last = (y_new - y).cwiseAbs().maxCoeff();
    if (inc) inc->push_back(last);
    y.swap(y_new);
    if (coupled) ops.apply_jump(y, by);
    else by.setZero(y.size());
    if (done) {
      if (diag) diag->fp_iterations.push_back(l);
      return;
    }
  }
  throw FixedPointError(fp.l_max, last);
}

Vector source_at(const SourceFn& g, double t, Eigen::Index n) {
  if (!g) return Vector::Zero(n);
  Vector v = g(t);
  if (v.size() != n) throw std::invalid_argument("Dirichlet source has the wrong length");
  return v;
}

class KrylovStepper : public IntervalStepper {
 protected:
  KrylovStepper(const OperatorSet& ops, TimeGridSpec tg, StepperOptions opt, double implicit_weight)
      : IntervalStepper(ops, tg, std::move(opt)),
        solver_(shifted_identity(ops.a, implicit_weight * tg_.dt()), opt_.solver) {}

  Vector solve(const Vector& rhs, const Vector& guess, StepDiagnostics* diag) const {
    SolveResult r = solver_.solve(rhs, guess);
    if (diag) {
      diag->max_solver_iterations = std::max(diag->max_solver_iterations, r.iterations);
      diag->total_solver_iterations += r.iterations;
      diag->max_solver_residual = std::max(diag->max_solver_residual, r.relative_residual);
      diag->solver_restarts += r.restarted ? 1 : 0;
    }
    return std::move(r.x);
  }

  PreconditionedSolver solver_;
};

class CnfiStepper final : public KrylovStepper {
 public:
  CnfiStepper(const OperatorSet& ops, TimeGridSpec tg, StepperOptions opt) : KrylovStepper(ops, tg, std::move(opt), 0.5) {}

  Vector march(const Vector& v0, double t0, StepDiagnostics* diag) const override {
    const double dt = tg_.dt();
    const double h = 0.5 * dt;
    const Eigen::Index n = v0.size();
    auto solve = [&](const Vector& rhs, const Vector& guess) { return this->solve(rhs, guess, diag); };

    Vector v = v0, bv = ops_.apply_jump(v0);
    Vector v_prev, bv_prev;
    for (int step = 0; step < tg_.n_steps; ++step) {
      const double t = t0 + step * dt;
      Vector y, by;
      if (opt_.rannacher && step < 2) {
        y = v;
        by = bv;
        for (int half = 1; half <= 2; ++half) {
          Vector base = y;
          if (opt_.source) base += h * source_at(opt_.source, t + half * h, n);
          fixed_point(ops_, base, h, y, by, solve, opt_.fp, diag);
        }
      } else {
        if (step == 0) {
          y = v;
          by = bv;
        } else {
          y = 2.0 * v - v_prev;
          by = 2.0 * bv - bv_prev;
        }
        Vector base = v + h * (ops_.a * v) + h * bv;
        if (opt_.source) base += h * (source_at(opt_.source, t, n) + source_at(opt_.source, t + dt, n));
        fixed_point(ops_, base, h, y, by, solve, opt_.fp, diag);
      }
      v_prev.swap(v);
      bv_prev.swap(bv);
      v.swap(y);
      bv.swap(by);
    }
    return v;
  }
};

class DirkfiStepper final : public KrylovStepper {
 public:
  DirkfiStepper(const OperatorSet& ops, TimeGridSpec tg, StepperOptions opt)
      : KrylovStepper(ops, tg, opt, opt.dirk.theta) {}

  Vector march(const Vector& v0, double t0, StepDiagnostics* diag) const override {
    const double dt = tg_.dt();
    const double th = opt_.dirk.theta;
    const Eigen::Index n = v0.size();
    auto solve = [&](const Vector& rhs, const Vector& guess) { return this->solve(rhs, guess, diag); };

    Vector v = v0, bv = ops_.apply_jump(v0);
    Vector v_prev, bv_prev;
    for (int step = 0; step < tg_.n_steps; ++step) {
      const double t = t0 + step * dt;
      const Vector fv = ops_.a * v + bv;
      Vector g0, g1;
      if (opt_.source) {
        g0 = source_at(opt_.source, t, n);
        g1 = source_at(opt_.source, t + dt, n);
      }

      Vector y, by;
      if (step == 0) {
        y = v;
        by = bv;
      } else {
        y = 2.0 * v - v_prev;
        by = 2.0 * bv - bv_prev;
      }
      Vector w1 = v + (1.0 - th) * dt * fv;
      if (opt_.source) w1 += (1.0 - th) * dt * g0 + th * dt * g1;
      fixed_point(ops_, w1, th * dt, y, by, solve, opt_.fp, diag);

      Vector w2 = v + 0.5 * dt * fv + (0.5 - th) * dt * (ops_.a * y + by);
      if (opt_.source) w2 += 0.5 * dt * g0 + (0.5 - th) * dt * g1 + th * dt * g1;
      fixed_point(ops_, w2, th * dt, y, by, solve, opt_.fp, diag);

      v_prev.swap(v);
      bv_prev.swap(bv);
      v.swap(y);
      bv.swap(by);
    }
    return v;
  }
};

class SlcnfiStepper final : public IntervalStepper {
 public:
  SlcnfiStepper(const OperatorSet& ops, const Grid2D& grid, const ModelParams& p, TimeGridSpec tg,
                StepperOptions opt)
      : IntervalStepper(ops, tg, std::move(opt)) {
    if (ops.boundary != BoundaryKind::Linear)
      throw std::invalid_argument("the semi-Lagrangian stepper supports linear boundary conditions only");
    if (opt_.source) throw std::invalid_argument("the semi-Lagrangian stepper takes no boundary source");
    const double dt = tg_.dt();
    const double ex = std::exp(-p.alpha * dt);
    const double ey = std::exp(-p.beta * dt);
    const Vector xd = (p.mu * (1.0 - ex) + ex * grid.xs.array()).matrix();
    const Vector yd = (ey * grid.ys.array()).matrix();
    sx_ = spline_interpolation_matrix(grid.xs, xd);
    syt_ = spline_interpolation_matrix(grid.ys, yd).transpose();

    const auto d2 = second_derivative_1d(grid.xs, BoundaryKind::Linear);
    SparseMatrix eye(grid.nx(), grid.nx());
    eye.setIdentity();
    const SparseMatrix ax = 0.5 * p.sigma * p.sigma * d2.interior - (p.r + p.lambda) * eye;
    tri_ = TridiagonalLU::from_sparse(SparseMatrix(eye - 0.5 * dt * ax));
  }

  Vector march(const Vector& v0, double, StepDiagnostics* diag) const override {
    const double h = 0.5 * tg_.dt();
    const Eigen::Index nx = ops_.nx, ny = ops_.ny;
    auto solve = [&](const Vector& rhs, const Vector&) {
      Vector out = rhs;
      Eigen::Map<RowMatrix> m(out.data(), nx, ny);
      RowMatrix block = m;
      tri_.solve_rows(block);
      m = block;
      return out;
    };

    Vector v = v0, bv = ops_.apply_jump(v0);
    Vector v_prev, bv_prev;
    RowMatrix tmp(nx, ny);
    for (int step = 0; step < tg_.n_steps; ++step) {
      Vector w = v + h * (ops_.a_diff * v) + h * bv;
      Eigen::Map<const RowMatrix> wm(w.data(), nx, ny);
      tmp.noalias() = sx_ * wm;
      Vector base(nx * ny);
      Eigen::Map<RowMatrix> bm(base.data(), nx, ny);
      bm.noalias() = tmp * syt_;

      Vector y, by;
      if (step == 0) {
        y = v;
        by = bv;
      } else {
        y = 2.0 * v - v_prev;
        by = 2.0 * bv - bv_prev;
      }
      fixed_point(ops_, base, h, y, by, solve, opt_.fp, diag);
      v_prev.swap(v);
      bv_prev.swap(bv);
      v.swap(y);
      bv.swap(by);
    }
    return v;
  }

 private:
  RowMatrix sx_;
  RowMatrix syt_;
  TridiagonalLU tri_;
};

}  // namespace

std::unique_ptr<IntervalStepper> make_stepper(StepperKind kind, const OperatorSet& ops, const Grid2D& grid,
                                              const ModelParams& params, const TimeGridSpec& tg,
                                              const StepperOptions& opt) {
  switch (kind) {
    case StepperKind::Cnfi: return std::make_unique<CnfiStepper>(ops, tg, opt);
    case StepperKind::Dirkfi: return std::make_unique<DirkfiStepper>(ops, tg, opt);
    case StepperKind::Slcnfi: return std::make_unique<SlcnfiStepper>(ops, grid, params, tg, opt);
  }
  throw std::invalid_argument("unknown stepper kind");
}

StepResult cnfi_interval(const OperatorSet& ops, const Vector& v0, const TimeGridSpec& tg, const FixedPointConfig& fp,
                         bool rannacher, const SolverConfig& solver, const SourceFn& source) {
  StepperOptions opt;
  opt.fp = fp;
  opt.solver = solver;
  opt.rannacher = rannacher;
  opt.source = source;
  StepResult out;
  out.values = CnfiStepper(ops, tg, opt).march(v0, 0.0, &out.diagnostics);
  return out;
}

StepResult dirkfi_interval(const OperatorSet& ops, const Vector& v0, const TimeGridSpec& tg,
                           const FixedPointConfig& fp, const DirkConfig& dc, const SolverConfig& solver,
                           const SourceFn& source) {
  StepperOptions opt;
  opt.fp = fp;
  opt.solver = solver;
  opt.dirk = dc;
  opt.source = source;
  StepResult out;
  out.values = DirkfiStepper(ops, tg, opt).march(v0, 0.0, &out.diagnostics);
  return out;
}

StepResult slcnfi_interval(const OperatorSet& ops, const Grid2D& grid, const ModelParams& params, const Vector& v0,
                           const TimeGridSpec& tg, const FixedPointConfig& fp) {
  StepperOptions opt;
  opt.fp = fp;
  StepResult out;
  out.values = SlcnfiStepper(ops, grid, params, tg, opt).march(v0, 0.0, &out.diagnostics);
  return out;
}

EuropeanResult price_european(const PricingSetup& s, double maturity, int n_steps) {
  s.params.validate();
  EuropeanResult out;
  out.grid = make_sinh_grid(s.domain, s.m1, s.m2, s.strike, s.d);
  const OperatorSet ops = assemble(out.grid, s.params, s.convection, BoundaryKind::Linear, s.tail_correction);
  const auto stepper = make_stepper(s.stepper, ops, out.grid, s.params, {n_steps, maturity}, s.options);
  out.values = stepper->march(cell_average_payoff(out.grid, s.strike), &out.diagnostics);
  return out;
}

}  // namespace swingpide
