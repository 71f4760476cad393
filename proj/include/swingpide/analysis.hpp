#pragma once

#include "swingpide/discretize.hpp"
#include "swingpide/grid.hpp"
#include "swingpide/model.hpp"
#include "swingpide/stepper.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace swingpide {

// ---------------------------------------------------------------- errors

/// Reference values carried from `fine` onto the nodes of `coarse` by
/// bicubic spline interpolation (exact where nodes coincide up to spline
/// reproduction).
Vector inject(const Grid2D& fine, const Vector& fine_values, const Grid2D& coarse);

/// max |solution - reference| over the region-of-interest nodes of g.
double total_error(const Vector& solution, const Vector& reference, const Grid2D& g);

/// max |solution - reference| over all nodes.
double temporal_error(const Vector& solution, const Vector& reference);

enum class ErrorKind { Total, Temporal };

struct OrderFit {
  double order = 0.0;
  double r_squared = 0.0;
  bool valid = false;  ///< R^2 >= 0.98 over at least three points
  std::size_t points_used = 0;
};

/// Least-squares slope of log(error) against log(resolution) over the
/// finer half of the points (at least three); order = -slope.
OrderFit fit_order(const std::vector<std::pair<double, double>>& resolution_error);

struct ErrorSample {
  int m = 0;
  int n_steps = 0;
  double error = 0.0;
  double seconds = 0.0;
};

struct ErrorReport {
  ErrorKind kind = ErrorKind::Total;
  StepperKind scheme = StepperKind::Cnfi;
  std::vector<ErrorSample> samples;
  OrderFit fit;

  void refit();
};

/// Temporal-error study on one mesh. Each scheme is run for every N and
/// compared to a CNFI run with `n_reference` steps.
std::vector<ErrorReport> temporal_study(const PricingSetup& base, double maturity, int m,
                                        const std::vector<int>& n_values, int n_reference,
                                        const std::vector<StepperKind>& schemes);

/// Total-error study with N = n_of_m(m), against a CNFI reference at
/// (m_reference, n_reference).
std::vector<ErrorReport> total_study(const PricingSetup& base, double maturity, const std::vector<int>& m_values,
                                     const std::function<int(int)>& n_of_m, int m_reference, int n_reference,
                                     const std::vector<StepperKind>& schemes);

/// Same as total_study but with a precomputed reference solution.
std::vector<ErrorReport> total_study(const PricingSetup& base, double maturity, const std::vector<int>& m_values,
                                     const std::function<int(int)>& n_of_m, const EuropeanResult& reference,
                                     const std::vector<StepperKind>& schemes);

// ---------------------------------------------------------------- theory

struct TheoryCheck {
  std::string name;
  double bound = 0.0;
  double observed = 0.0;
  bool applicable = true;
  bool pass = false;

  std::string describe() const;
};

/// Largest eigenvalue of (M + M^T) / 2. Dense eigensolve up to 2000 rows,
/// Lanczos with full reorthogonalisation above that.
double log_norm_2(const SparseMatrix& m);
double log_norm_2(const Eigen::MatrixXd& m);

/// ||B||_inf <= lambda and ||B||_2 <= lambda sqrt(L_y ||f||_inf) for
/// B = I (x) lambda * btilde.
std::pair<TheoryCheck, TheoryCheck> jump_norm_check(const Eigen::MatrixXd& btilde, double lambda,
                                                    const JumpDensity& density, double l_y);

/// |w_{-1}| - 10 w_2.
double convection_bound_constant(const ConvectionWeights& w);

/// C~ = (|w_{-1}| - 10 w_2)(alpha + beta) - (r + lambda).
double c_tilde(const ModelParams& p, const ConvectionWeights& w);
/// C^ = C~ + lambda sqrt(L_y ||f||_inf).
double c_hat(const ModelParams& p, const ConvectionWeights& w, double l_y);

/// mu_2[D_x Atilde_x] <= (|w_{-1}| - 10 w_2) btilde for coefficients
/// a_i = btilde (x_c - x_i) on a uniform Dirichlet mesh of [lo, hi] with
/// m + 1 unknowns; btilde and x_c in [x_2, x_{m-2}] drawn at random.
std::vector<TheoryCheck> convection_lognorm_check(ConvectionScheme scheme, int m, int samples, std::uint64_t seed,
                                                  double lo = -100.0, double hi = 250.0);

/// mu_2[A] <= C~ for the Dirichlet operator on a uniform grid.
TheoryCheck operator_lognorm_check(const Grid2D& g, const ModelParams& p, ConvectionScheme scheme);

/// Theta for the l2 contraction: (dt/2) lambda sqrt(L_y ||f||_inf) / (1 - (dt/2) C~).
double theta_l2(const ModelParams& p, const ConvectionWeights& w, double l_y, double dt);

struct ThetaInf {
  double theta = 0.0;
  double kappa_x = 0.0;
  double kappa_y = 0.0;
  bool hypothesis = false;  ///< kappa_x dt / (2 dx) + kappa_y dt / (2 dy) < 1 + dt r / 2
};

/// Theta for the l-infinity contraction on a uniform mesh.
ThetaInf theta_inf(const ModelParams& p, const ConvectionWeights& w, const Grid2D& g, double dt);

/// Largest per-iteration increment ratio of the CNFI fixed-point loop,
/// measured in the 2-norm with direct solves, against Theta_l2 (Dirichlet)
/// or Theta_inf (linear, uniform mesh).
struct ContractionReport {
  TheoryCheck check;
  int steps = 0;
  int ratios_counted = 0;
  int max_iterations = 0;
};

ContractionReport contraction_check(const Grid2D& g, const ModelParams& p, double strike, ConvectionScheme scheme,
                                    BoundaryKind bc, const TimeGridSpec& tg);

/// Stability functions of Crank-Nicolson and of the DIRK scheme.
std::complex<double> stability_cn(std::complex<double> z);
std::complex<double> stability_dirk(std::complex<double> z, double theta);

struct GrowthReport {
  std::vector<TheoryCheck> checks;
  long samples = 0;
  long violations = 0;
};

/// Samples z = x + iy with x in [0, 0.95 / theta] (nx points) and
/// |y| <= y_max (ny points).
GrowthReport error_growth_check(double theta, double nu, int nx = 200, int ny = 400, double y_max = 100.0);

struct TheorySuiteReport {
  std::vector<TheoryCheck> jump_norms;
  std::vector<TheoryCheck> convection_lognorms;
  std::vector<TheoryCheck> operator_lognorms;
  std::vector<TheoryCheck> growth;
  long growth_samples = 0;
  std::vector<ContractionReport> contraction;

  std::vector<TheoryCheck> all() const;
  bool all_pass() const;
};

/// Jump-operator norms for the six presets on uniform meshes with m2 = 100,
/// convection log-norms for the four weight presets at m in {10, 20, 50},
/// the log-norm of A for Set 1 at m = 30 (Dirichlet), error growth for four
/// theta values and the l2 contraction for Set 1, m = 50, dt = 0.1 / 100.
TheorySuiteReport theory_suite(std::uint64_t seed);

// ---------------------------------------------------------------- Monte Carlo

struct McEstimate {
  double price = 0.0;
  double std_error = 0.0;
  long paths = 0;
};

/// Exact-in-distribution simulation of (X_T, Y_T) and the discounted
/// European call payoff.
McEstimate mc_oracle_european(const ModelParams& p, double strike, double maturity, double x0, double y0, long n_paths,
                              std::uint64_t seed);

}  // namespace swingpide
