#include "swingpide/analysis.hpp"

#include "swingpide/config.hpp"
#include "swingpide/spline.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

namespace swingpide {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Vector inject(const Grid2D& fine, const Vector& values, const Grid2D& coarse) {
  if (values.size() != fine.size()) throw std::invalid_argument("inject: value count does not match the grid");
  Eigen::Map<const RowMatrix> vm(values.data(), fine.nx(), fine.ny());
  const SplineSurface surf(fine.xs, fine.ys, vm);
  RowMatrix out = surf.evaluate_tensor(coarse.xs, coarse.ys);
  return Eigen::Map<const Vector>(out.data(), out.size());
}

double total_error(const Vector& solution, const Vector& reference, const Grid2D& g) {
  if (solution.size() != g.size() || reference.size() != g.size())
    throw std::invalid_argument("total_error: vectors do not match the grid");
  double worst = 0.0;
  bool any = false;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    if (!g.roi_mask[static_cast<std::size_t>(k)]) continue;
    any = true;
    worst = std::max(worst, std::abs(solution[k] - reference[k]));
  }
  if (!any) throw std::invalid_argument("total_error: the region of interest contains no nodes");
  return worst;
}

double temporal_error(const Vector& solution, const Vector& reference) {
  if (solution.size() != reference.size()) throw std::invalid_argument("temporal_error: mesh mismatch");
  return (solution - reference).cwiseAbs().maxCoeff();
}

OrderFit fit_order(const std::vector<std::pair<double, double>>& pts_in) {
  OrderFit fit;
  auto pts = pts_in;
  std::sort(pts.begin(), pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return fit;
  const std::size_t use = std::max<std::size_t>(3, (n + 1) / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = n - use; k < n; ++k) {
    if (!(pts[k].second > 0.0)) return fit;
    const double x = std::log(pts[k].first), y = std::log(pts[k].second);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double u = static_cast<double>(use);
  const double vxx = sxx - sx * sx / u, vxy = sxy - sx * sy / u, vyy = syy - sy * sy / u;
  const double slope = vxy / vxx;
  fit.order = -slope;
  fit.r_squared = vyy > 0.0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
  fit.points_used = use;
  fit.valid = fit.r_squared >= 0.98;
  return fit;
}

void ErrorReport::refit() {
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : samples)
    pts.emplace_back(kind == ErrorKind::Total ? s.m : s.n_steps, s.error);
  fit = fit_order(pts);
}

std::vector<ErrorReport> temporal_study(const PricingSetup& base, double maturity, int m,
                                        const std::vector<int>& n_values, int n_reference,
                                        const std::vector<StepperKind>& schemes) {
  base.params.validate();
  const Grid2D g = make_sinh_grid(base.domain, m, m, base.strike, base.d);
  const OperatorSet ops = assemble(g, base.params, base.convection, BoundaryKind::Linear, base.tail_correction);
  const Vector v0 = cell_average_payoff(g, base.strike);
  const Vector ref =
      make_stepper(StepperKind::Cnfi, ops, g, base.params, {n_reference, maturity}, base.options)->march(v0);

  std::vector<ErrorReport> out;
  for (StepperKind kind : schemes) {
    ErrorReport rep;
    rep.kind = ErrorKind::Temporal;
    rep.scheme = kind;
    for (int n : n_values) {
      const auto t0 = std::chrono::steady_clock::now();
      const Vector v = make_stepper(kind, ops, g, base.params, {n, maturity}, base.options)->march(v0);
      rep.samples.push_back({m, n, temporal_error(v, ref), seconds_since(t0)});
    }
    rep.refit();
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<ErrorReport> total_study(const PricingSetup& base, double maturity, const std::vector<int>& m_values,
                                     const std::function<int(int)>& n_of_m, const EuropeanResult& reference,
                                     const std::vector<StepperKind>& schemes) {
  base.params.validate();
  std::vector<ErrorReport> out(schemes.size());
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    out[s].kind = ErrorKind::Total;
    out[s].scheme = schemes[s];
  }
  for (int m : m_values) {
    const Grid2D g = make_sinh_grid(base.domain, m, m, base.strike, base.d);
    const OperatorSet ops = assemble(g, base.params, base.convection, BoundaryKind::Linear, base.tail_correction);
    const Vector v0 = cell_average_payoff(g, base.strike);
    const Vector ref = inject(reference.grid, reference.values, g);
    const int n = n_of_m(m);
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      const auto t0 = std::chrono::steady_clock::now();
      const Vector v = make_stepper(schemes[s], ops, g, base.params, {n, maturity}, base.options)->march(v0);
      out[s].samples.push_back({m, n, total_error(v, ref, g), seconds_since(t0)});
    }
  }
  for (auto& r : out) r.refit();
  return out;
}

std::vector<ErrorReport> total_study(const PricingSetup& base, double maturity, const std::vector<int>& m_values,
                                     const std::function<int(int)>& n_of_m, int m_reference, int n_reference,
                                     const std::vector<StepperKind>& schemes) {
  PricingSetup ref_setup = base;
  ref_setup.m1 = ref_setup.m2 = m_reference;
  ref_setup.stepper = StepperKind::Cnfi;
  const EuropeanResult reference = price_european(ref_setup, maturity, n_reference);
  return total_study(base, maturity, m_values, n_of_m, reference, schemes);
}

// ---------------------------------------------------------------- theory

std::string TheoryCheck::describe() const {
  std::ostringstream os;
  os << std::setprecision(10) << name << ": observed " << observed << " bound " << bound << " -> ";
  if (!applicable) os << "not applicable";
  else os << (pass ? "PASS" : "FAIL");
  return os.str();
}

namespace {

double dense_max_eigen(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolve failed");
  return es.eigenvalues().maxCoeff();
}

double lanczos_max_eigen(const SparseMatrix& s) {
  const Eigen::Index n = s.rows();
  const int k_max = static_cast<int>(std::min<Eigen::Index>(n, 400));
  Eigen::MatrixXd q(n, k_max + 1);
  std::vector<double> alpha, beta;
  Vector v = Vector::LinSpaced(n, 1.0, 2.0);
  q.col(0) = v.normalized();
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k < k_max; ++k) {
    Vector w = s * q.col(k);
    const double a = q.col(k).dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(k + 1) * (q.leftCols(k + 1).transpose() * w);
    const double b = w.norm();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int i = 0; i <= k; ++i) {
      t(i, i) = alpha[i];
      if (i < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::Index top = k;
    const double theta = es.eigenvalues()[top];
    const double resid = std::abs(b * es.eigenvectors()(k, top));
    if (b <= 1e-14 * std::max(1.0, std::abs(theta)) || resid <= 1e-10 * std::max(1.0, std::abs(theta)) ||
        (k > 20 && std::abs(theta - prev) <= 1e-12 * std::max(1.0, std::abs(theta)))) {
      return theta;
    }
    prev = theta;
    beta.push_back(b);
    q.col(k + 1) = w / b;
  }
  throw std::runtime_error("Lanczos iteration did not converge");
}

}  // namespace

double log_norm_2(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("log_norm_2 needs a square matrix");
  const Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  return dense_max_eigen(s);
}

double log_norm_2(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("log_norm_2 needs a square matrix");
  const SparseMatrix mt = m.transpose();
  const SparseMatrix s = 0.5 * (m + mt);
  if (m.rows() <= 2000) return dense_max_eigen(Eigen::MatrixXd(s));
  return lanczos_max_eigen(s);
}

std::pair<TheoryCheck, TheoryCheck> jump_norm_check(const Eigen::MatrixXd& btilde, double lambda,
                                                    const JumpDensity& density, double l_y) {
  TheoryCheck inf{"||B||_inf <= lambda", lambda, lambda * btilde.cwiseAbs().rowwise().sum().maxCoeff()};
  inf.pass = inf.observed <= inf.bound * (1.0 + 1e-12);
  TheoryCheck two{"||B||_2 <= lambda sqrt(L_y ||f||_inf)", lambda * std::sqrt(l_y * density_sup(density)), 0.0};
  if (lambda != 0.0) {
    const Eigen::MatrixXd btb = btilde.transpose() * btilde;
    two.observed = lambda * std::sqrt(std::max(0.0, dense_max_eigen(btb)));
  }
  two.pass = two.observed <= two.bound * (1.0 + 1e-12);
  return {inf, two};
}

double convection_bound_constant(const ConvectionWeights& w) { return std::abs(w.w_m1) - 10.0 * w.w2; }

double c_tilde(const ModelParams& p, const ConvectionWeights& w) {
  return convection_bound_constant(w) * (p.alpha + p.beta) - (p.r + p.lambda);
}

double c_hat(const ModelParams& p, const ConvectionWeights& w, double l_y) {
  return c_tilde(p, w) + p.lambda * std::sqrt(l_y * density_sup(p.density));
}

double theta_l2(const ModelParams& p, const ConvectionWeights& w, double l_y, double dt) {
  return 0.5 * dt * p.lambda * std::sqrt(l_y * density_sup(p.density)) / (1.0 - 0.5 * dt * c_tilde(p, w));
}

ThetaInf theta_inf(const ModelParams& p, const ConvectionWeights& w, const Grid2D& g, double dt) {
  if (!is_uniform(g.xs) || !is_uniform(g.ys)) throw std::invalid_argument("theta_inf needs a uniform mesh");
  ThetaInf t;
  double ax = 0.0, by = 0.0;
  for (Eigen::Index i = 0; i < g.nx(); ++i) ax = std::max(ax, std::abs(p.alpha * (p.mu - g.xs[i])));
  for (Eigen::Index j = 0; j < g.ny(); ++j) by = std::max(by, std::abs(p.beta * g.ys[j]));
  t.kappa_x = w.abs_sum() * ax;
  t.kappa_y = w.abs_sum() * by;
  const double cfl = t.kappa_x * dt / (2.0 * g.dx(0)) + t.kappa_y * dt / (2.0 * g.dy(0));
  t.hypothesis = cfl < 1.0 + 0.5 * dt * p.r;
  t.theta = 0.5 * dt * p.lambda / (1.0 + 0.5 * dt * (p.r + p.lambda) - cfl);
  return t;
}

std::vector<TheoryCheck> convection_lognorm_check(ConvectionScheme scheme, int m, int samples, std::uint64_t seed,
                                                  double lo, double hi) {
  if (m < 6) throw std::invalid_argument("convection_lognorm_check needs m >= 6");
  const double h = (hi - lo) / (m + 2);
  const Vector nodes = Vector::LinSpaced(m + 1, lo + h, hi - h);
  const double k = convection_bound_constant(family_weights(scheme));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ub(0.05, 200.0);
  std::uniform_real_distribution<double> uc(nodes[2], nodes[m - 2]);
  std::vector<TheoryCheck> out;
  for (int s = 0; s < samples; ++s) {
    const double b = ub(rng);
    const double xc = uc(rng);
    const Vector coeff = (b * (xc - nodes.array())).matrix();
    const auto op = first_derivative_1d(nodes, coeff, scheme, BoundaryKind::Dirichlet, lo, hi);
    TheoryCheck c;
    c.name = "mu2[DxAx] <= (|w-1| - 10 w2) b (" + std::string(to_string(scheme)) + ", m=" + std::to_string(m) + ")";
    c.bound = k * b;
    c.observed = log_norm_2(Eigen::MatrixXd(op.interior));
    c.pass = c.observed <= c.bound + 1e-10;
    out.push_back(c);
  }
  return out;
}

TheoryCheck operator_lognorm_check(const Grid2D& g, const ModelParams& p, ConvectionScheme scheme) {
  const OperatorSet ops = assemble(g, p, scheme, BoundaryKind::Dirichlet, false);
  TheoryCheck c;
  c.name = "mu2[A] <= C~ (" + std::string(to_string(scheme)) + ")";
  c.bound = c_tilde(p, family_weights(scheme));
  c.observed = log_norm_2(ops.a);
  c.pass = c.observed <= c.bound + 1e-10 * std::max(1.0, std::abs(c.bound));
  return c;
}

ContractionReport contraction_check(const Grid2D& g, const ModelParams& p, double strike, ConvectionScheme scheme,
                                    BoundaryKind bc, const TimeGridSpec& tg) {
  tg.validate();
  const OperatorSet ops = assemble(g, p, scheme, bc, false);
  const double dt = tg.dt();
  const double h = 0.5 * dt;
  const ConvectionWeights w = family_weights(scheme);
  const double l_y = g.domain.y_hi - g.domain.y_lo;

  ContractionReport rep;
  const bool two_norm = bc == BoundaryKind::Dirichlet;
  if (two_norm) {
    rep.check.name = "increment ratio (l2) <= Theta_l2";
    rep.check.bound = theta_l2(p, w, l_y, dt);
    rep.check.applicable = c_hat(p, w, l_y) * dt < 2.0;
  } else {
    const ThetaInf t = theta_inf(p, w, g, dt);
    rep.check.name = "increment ratio (l-inf) <= Theta_inf";
    rep.check.bound = t.theta;
    rep.check.applicable = t.hypothesis;
  }

  SparseMatrix eye(ops.size(), ops.size());
  eye.setIdentity();
  Eigen::SparseMatrix<double> mcol = eye - h * ops.a;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(mcol);
  if (lu.info() != Eigen::Success) throw std::runtime_error("contraction_check: LU factorisation failed");

  DirichletData data;
  data.x_lower = [&](double y, double) { return payoff(g.domain.x_lo, y, strike); };
  data.x_upper = [&](double y, double) { return payoff(g.domain.x_hi, y, strike); };
  data.y_lower = [&](double x, double) { return payoff(x, g.domain.y_lo, strike); };
  data.y_upper = [&](double x, double) { return payoff(x, g.domain.y_hi, strike); };
  const Vector src = ops.boundary_source(data, 0.0);

  const FixedPointConfig fp{1e-13, 200};
  auto norm = [&](const Vector& v) { return two_norm ? v.norm() : v.cwiseAbs().maxCoeff(); };
  Vector v = nodal_payoff(g, strike), v_prev;
  double worst = 0.0;
  for (int n = 0; n < tg.n_steps; ++n) {
    const Vector base = v + h * (ops.a * v) + h * ops.apply_jump(v) + dt * src;
    Vector y = n == 0 ? v : Vector(2.0 * v - v_prev);
    double last_inc = -1.0;
    int l = 0;
    for (; l < fp.l_max; ++l) {
      Vector y_new = lu.solve(base + h * ops.apply_jump(y));
      const double inc = norm(y_new - y);
      const double floor = 1e-11 * std::max(1.0, norm(y_new));
      if (last_inc > floor && inc > floor) {
        worst = std::max(worst, inc / last_inc);
        ++rep.ratios_counted;
      }
      const bool done = p.lambda == 0.0 || fp_converged(y_new, y, fp);
      last_inc = inc;
      y.swap(y_new);
      if (done) break;
    }
    rep.max_iterations = std::max(rep.max_iterations, l + 1);
    v_prev.swap(v);
    v.swap(y);
    ++rep.steps;
  }
  rep.check.observed = worst;
  rep.check.pass = !rep.check.applicable || worst <= rep.check.bound;
  return rep;
}

std::complex<double> stability_cn(std::complex<double> z) { return (1.0 + 0.5 * z) / (1.0 - 0.5 * z); }

std::complex<double> stability_dirk(std::complex<double> z, double th) {
  const std::complex<double> den = (1.0 - th * z) * (1.0 - th * z);
  return (1.0 + (1.0 - 2.0 * th) * z + (0.5 - 2.0 * th + th * th) * z * z) / den;
}

GrowthReport error_growth_check(double theta, double nu, int nx, int ny, double y_max) {
  if (!(theta >= 0.25 && theta <= 0.5)) throw std::invalid_argument("theta must lie in [1/4, 1/2]");
  if (!(nu > 0.0 && nu < 1.0 / theta)) throw std::invalid_argument("nu must lie in (0, 1/theta)");
  if (nx < 2 || ny < 2) throw std::invalid_argument("sampling grid too small");
  GrowthReport rep;
  const double x_max = 0.95 / theta;
  const double r_nu = stability_dirk(nu, theta).real();
  const double slope = (r_nu - 1.0) / nu;

  TheoryCheck modulus{"|R_theta(x+iy)| <= R_theta(x)", 0.0, -std::numeric_limits<double>::infinity()};
  TheoryCheck chord{"R_theta(x) <= 1 + (R_theta(nu)-1)/nu x", 0.0, -std::numeric_limits<double>::infinity()};
  TheoryCheck cn{"|R(x+iy)| <= 1 + 2x", 0.0, -std::numeric_limits<double>::infinity()};
  long viol_mod = 0, viol_chord = 0, viol_cn = 0;
  for (int a = 0; a < nx; ++a) {
    const double x = x_max * a / (nx - 1);
    const double rx = stability_dirk(x, theta).real();
    if (x <= nu) {
      const double excess = rx - (1.0 + slope * x);
      chord.observed = std::max(chord.observed, excess);
      if (excess > 1e-12) ++viol_chord;
    }
    for (int b = 0; b < ny; ++b) {
      const double y = -y_max + 2.0 * y_max * b / (ny - 1);
      const std::complex<double> z(x, y);
      const double excess = std::abs(stability_dirk(z, theta)) - rx;
      modulus.observed = std::max(modulus.observed, excess);
      if (excess > 1e-12) ++viol_mod;
      ++rep.samples;
      if (x <= 1.0) {
        const double e_cn = std::abs(stability_cn(z)) - (1.0 + 2.0 * x);
        cn.observed = std::max(cn.observed, e_cn);
        if (e_cn > 1e-12) ++viol_cn;
      }
    }
  }
  modulus.bound = chord.bound = cn.bound = 1e-12;
  modulus.pass = viol_mod == 0;
  chord.pass = viol_chord == 0;
  cn.pass = viol_cn == 0;
  std::ostringstream tag;
  tag << " (theta=" << std::setprecision(6) << theta << ")";
  modulus.name += tag.str();
  chord.name += tag.str();
  cn.name += tag.str();
  rep.violations = viol_mod + viol_chord + viol_cn;
  rep.checks = {modulus, chord, cn};
  return rep;
}

std::vector<TheoryCheck> TheorySuiteReport::all() const {
  std::vector<TheoryCheck> out;
  for (const auto* group : {&jump_norms, &convection_lognorms, &operator_lognorms, &growth})
    out.insert(out.end(), group->begin(), group->end());
  for (const auto& c : contraction) out.push_back(c.check);
  return out;
}

bool TheorySuiteReport::all_pass() const {
  const auto checks = all();
  return std::all_of(checks.begin(), checks.end(), [](const TheoryCheck& c) { return c.pass; });
}

TheorySuiteReport theory_suite(std::uint64_t seed) {
  TheorySuiteReport rep;
  const ConvectionScheme schemes[] = {ConvectionScheme::Upwind2, ConvectionScheme::Quick, ConvectionScheme::Upwind3,
                                      ConvectionScheme::Central};
  for (int id = 1; id <= 6; ++id) {
    const Preset ps = preset(id);
    const Grid2D g = make_uniform_grid(ps.domain, 4, 100, ps.strike);
    const JumpBlock jb = jump_operator(g, ps.params, false);
    auto [inf, two] = jump_norm_check(jb.plain, ps.params.lambda, ps.params.density, ps.domain.y_max - ps.domain.y_min);
    inf.name += " (set " + std::to_string(id) + ")";
    two.name += " (set " + std::to_string(id) + ")";
    rep.jump_norms.push_back(inf);
    rep.jump_norms.push_back(two);
  }
  std::uint64_t stream = seed;
  for (ConvectionScheme s : schemes) {
    for (int m : {10, 20, 50}) {
      auto checks = convection_lognorm_check(s, m, 20, stream++);
      rep.convection_lognorms.insert(rep.convection_lognorms.end(), checks.begin(), checks.end());
    }
  }
  const Preset set1 = preset(1);
  const Grid2D gd30 = make_uniform_dirichlet_grid(set1.domain, 30, 30, set1.strike);
  for (ConvectionScheme s : schemes) rep.operator_lognorms.push_back(operator_lognorm_check(gd30, set1.params, s));
  for (double th : {0.25, 0.3, 1.0 - 0.70710678118654752440, 0.5}) {
    GrowthReport g = error_growth_check(th, 0.6 / th);
    rep.growth.insert(rep.growth.end(), g.checks.begin(), g.checks.end());
    rep.growth_samples += g.samples;
  }
  const Grid2D gd50 = make_uniform_dirichlet_grid(set1.domain, 50, 50, set1.strike);
  rep.contraction.push_back(
      contraction_check(gd50, set1.params, set1.strike, ConvectionScheme::Quick, BoundaryKind::Dirichlet, {100, 0.1}));
  return rep;
}

// ---------------------------------------------------------------- Monte Carlo

McEstimate mc_oracle_european(const ModelParams& p, double strike, double maturity, double x0, double y0, long n_paths,
                              std::uint64_t seed) {
  if (n_paths < 1000) throw std::invalid_argument("Monte Carlo needs at least 1000 paths");
  if (!(maturity > 0.0)) throw std::invalid_argument("maturity must be positive");
  const double ea = std::exp(-p.alpha * maturity);
  const double mean_x = p.mu + (x0 - p.mu) * ea;
  const double var_x = p.alpha > 0.0 ? p.sigma * p.sigma * (1.0 - ea * ea) / (2.0 * p.alpha)
                                     : p.sigma * p.sigma * maturity;
  const double sd_x = std::sqrt(var_x);
  const double y_det = y0 * std::exp(-p.beta * maturity);

  constexpr long chunk = 1 << 16;
  double sum = 0.0, sum_sq = 0.0;
  for (long start = 0, c = 0; start < n_paths; start += chunk, ++c) {
    std::seed_seq sseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(sseq);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::exponential_distribution<double> gap(p.lambda > 0.0 ? p.lambda : 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const long end = std::min(n_paths, start + chunk);
    double csum = 0.0, csq = 0.0;
    for (long k = start; k < end; ++k) {
      const double x = mean_x + sd_x * normal(rng);
      double y = y_det;
      if (p.lambda > 0.0) {
        for (double t = gap(rng); t <= maturity; t += gap(rng)) {
          double jump = 0.0;
          if (const auto* mj = std::get_if<MertonJumps>(&p.density)) {
            jump = mj->mean + mj->stddev * normal(rng);
          } else {
            const auto& kj = std::get<KouJumps>(p.density);
            if (unif(rng) < kj.p_up) jump = -std::log1p(-unif(rng)) / kj.eta_up;
            else jump = std::log1p(-unif(rng)) / kj.eta_down;
          }
          y += jump * std::exp(-p.beta * (maturity - t));
        }
      }
      const double pay = std::max(x + y - strike, 0.0);
      csum += pay;
      csq += pay * pay;
    }
    sum += csum;
    sum_sq += csq;
  }
  const double n = static_cast<double>(n_paths);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
  const double disc = std::exp(-p.r * maturity);
  return {disc * mean, disc * std::sqrt(var / n), n_paths};
}

}  // namespace swingpide
