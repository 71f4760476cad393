#pragma once

#include <algorithm>
#include <string>
#include <variant>

namespace swingpide {

/// Normally distributed jump sizes.
struct MertonJumps {
  double mean = 0.0;
  double stddev = 1.0;
};

/// Double-exponential jump sizes: upward with probability `p_up` and rate
/// `eta_up`, downward with rate `eta_down`.
struct KouJumps {
  double p_up = 0.5;
  double eta_up = 1.0;
  double eta_down = 1.0;
};

using JumpDensity = std::variant<MertonJumps, KouJumps>;

/// Throws std::invalid_argument when the density parameters are out of range.
void validate(const JumpDensity& d);

/// Coefficients of the two-factor spot model S = X + Y where X is an
/// Ornstein-Uhlenbeck diffusion and Y a mean-reverting compound Poisson jump
/// process.
struct ModelParams {
  double alpha = 8.0;    ///< mean-reversion speed of X
  double beta = 126.0;   ///< mean-reversion speed of Y
  double mu = 80.0;      ///< mean-reversion level of X
  double sigma = 11.0;   ///< volatility of X
  double r = 0.03;       ///< risk-free rate
  double lambda = 52.0;  ///< jump intensity
  JumpDensity density = MertonJumps{20.0, 60.0};

  void validate() const;
};

struct SwingContract {
  double strike = 50.0;
  double maturity = 1.0;
  int n_actions = 20;
  int local_cap = 1;
  int global_cap = 10;

  void validate() const;
  double action_spacing() const { return maturity / n_actions; }
};

enum class TailSide { Left, Right };

/// Zeroth and first moment of a density restricted to an interval.
struct Moments {
  double m0 = 0.0;
  double m1 = 0.0;
};

double density_pdf(const JumpDensity& d, double y);

/// sup_y f(y).
double density_sup(const JumpDensity& d);

/// E[J].
double density_mean(const JumpDensity& d);

/// Standard deviation of the jump size, used to size quadrature windows.
double density_scale(const JumpDensity& d);

/// m0 = int_a^b f(xi - shift) dxi and m1 = int_a^b xi f(xi - shift) dxi, in
/// closed form. Either bound may be infinite.
Moments segment_moments(const JumpDensity& d, double a, double b, double shift);

/// Moments of f over (-inf, c] (Left) or [c, inf) (Right).
Moments tail_moments(const JumpDensity& d, double c, TailSide side);

template <class Scalar>
Scalar payoff(Scalar x, Scalar y, Scalar strike) {
  return std::max(x + y - strike, Scalar(0));
}

std::string describe(const JumpDensity& d);

}  // namespace swingpide
