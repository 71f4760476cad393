#include "swingpide/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace swingpide {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double std_normal_pdf(double z) { return std::isinf(z) ? 0.0 : kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// P(za <= Z <= zb) for a standard normal Z, choosing the erfc branch that
// avoids subtracting two numbers close to one.
double normal_mass(double za, double zb) {
  if (za >= 0.0) return 0.5 * (std::erfc(za * kInvSqrt2) - std::erfc(zb * kInvSqrt2));
  if (zb <= 0.0) return 0.5 * (std::erfc(-zb * kInvSqrt2) - std::erfc(-za * kInvSqrt2));
  return 1.0 - 0.5 * std::erfc(zb * kInvSqrt2) - 0.5 * std::erfc(-za * kInvSqrt2);
}

Moments merton_moments(const MertonJumps& m, double ua, double ub) {
  const double za = (ua - m.mean) / m.stddev;
  const double zb = (ub - m.mean) / m.stddev;
  Moments out;
  out.m0 = normal_mass(za, zb);
  out.m1 = m.mean * out.m0 + m.stddev * (std_normal_pdf(za) - std_normal_pdf(zb));
  return out;
}

// Moments of p*eta*exp(-eta*u) over [c, d] with 0 <= c < d <= inf.
Moments exp_up(double weight, double eta, double c, double d) {
  const double ec = std::exp(-eta * c);
  Moments out;
  if (std::isinf(d)) {
    out.m0 = weight * ec;
    out.m1 = weight * (c + 1.0 / eta) * ec;
  } else {
    const double h = d - c;
    const double ed = std::exp(-eta * d);
    out.m0 = -weight * ec * std::expm1(-eta * h);
    out.m1 = weight * ((c + 1.0 / eta) * ec - (d + 1.0 / eta) * ed);
  }
  return out;
}

// Moments of q*eta*exp(eta*u) over [c, d] with -inf <= c < d <= 0.
Moments exp_down(double weight, double eta, double c, double d) {
  const double ed = std::exp(eta * d);
  Moments out;
  if (std::isinf(c)) {
    out.m0 = weight * ed;
    out.m1 = weight * (d - 1.0 / eta) * ed;
  } else {
    const double h = d - c;
    const double ec = std::exp(eta * c);
    out.m0 = -weight * ed * std::expm1(-eta * h);
    out.m1 = weight * ((d - 1.0 / eta) * ed - (c - 1.0 / eta) * ec);
  }
  return out;
}

Moments kou_moments(const KouJumps& k, double ua, double ub) {
  Moments out;
  if (ub > 0.0) {
    const auto up = exp_up(k.p_up, k.eta_up, std::max(ua, 0.0), ub);
    out.m0 += up.m0;
    out.m1 += up.m1;
  }
  if (ua < 0.0) {
    const auto down = exp_down(1.0 - k.p_up, k.eta_down, ua, std::min(ub, 0.0));
    out.m0 += down.m0;
    out.m1 += down.m1;
  }
  return out;
}

}  // namespace

void validate(const JumpDensity& d) {
  std::visit(overloaded{
                 [](const MertonJumps& m) {
                   if (!(m.stddev > 0.0) || !std::isfinite(m.mean))
                     throw std::invalid_argument("Merton jump density needs stddev > 0");
                 },
                 [](const KouJumps& k) {
                   if (!(k.p_up >= 0.0 && k.p_up <= 1.0))
                     throw std::invalid_argument("Kou up-probability must lie in [0, 1]");
                   if (!(k.eta_up > 0.0) || !(k.eta_down > 0.0))
                     throw std::invalid_argument("Kou decay rates must be positive");
                 },
             },
             d);
}

void ModelParams::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be non-negative");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  if (!(r >= 0.0)) throw std::invalid_argument("r must be non-negative");
  swingpide::validate(density);
}

void SwingContract::validate() const {
  if (!(maturity > 0.0)) throw std::invalid_argument("maturity must be positive");
  if (n_actions < 1) throw std::invalid_argument("n_actions must be at least 1");
  if (local_cap < 1) throw std::invalid_argument("local_cap must be at least 1");
  if (global_cap < 0) throw std::invalid_argument("global_cap must be non-negative");
}

double density_pdf(const JumpDensity& d, double y) {
  return std::visit(overloaded{
                        [y](const MertonJumps& m) {
                          const double z = (y - m.mean) / m.stddev;
                          return std_normal_pdf(z) / m.stddev;
                        },
                        [y](const KouJumps& k) {
                          if (y >= 0.0) return k.p_up * k.eta_up * std::exp(-k.eta_up * y);
                          return (1.0 - k.p_up) * k.eta_down * std::exp(k.eta_down * y);
                        },
                    },
                    d);
}

double density_sup(const JumpDensity& d) {
  return std::visit(overloaded{
                        [](const MertonJumps& m) { return kInvSqrt2Pi / m.stddev; },
                        [](const KouJumps& k) {
                          return std::max(k.p_up * k.eta_up, (1.0 - k.p_up) * k.eta_down);
                        },
                    },
                    d);
}

double density_mean(const JumpDensity& d) {
  return std::visit(overloaded{
                        [](const MertonJumps& m) { return m.mean; },
                        [](const KouJumps& k) {
                          return k.p_up / k.eta_up - (1.0 - k.p_up) / k.eta_down;
                        },
                    },
                    d);
}

double density_scale(const JumpDensity& d) {
  return std::visit(overloaded{
                        [](const MertonJumps& m) { return m.stddev; },
                        [](const KouJumps& k) {
                          const double second = 2.0 * k.p_up / (k.eta_up * k.eta_up) +
                                                2.0 * (1.0 - k.p_up) / (k.eta_down * k.eta_down);
                          const double mean = k.p_up / k.eta_up - (1.0 - k.p_up) / k.eta_down;
                          return std::sqrt(second - mean * mean);
                        },
                    },
                    d);
}

Moments segment_moments(const JumpDensity& d, double a, double b, double shift) {
  if (a > b) throw std::invalid_argument("segment_moments: lower bound exceeds upper bound");
  if (a == b) return {};
  const double ua = a - shift;
  const double ub = b - shift;
  Moments u = std::visit(overloaded{
                             [&](const MertonJumps& m) { return merton_moments(m, ua, ub); },
                             [&](const KouJumps& k) { return kou_moments(k, ua, ub); },
                         },
                         d);
  // xi = u + shift
  return {u.m0, u.m1 + shift * u.m0};
}

Moments tail_moments(const JumpDensity& d, double c, TailSide side) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return side == TailSide::Left ? segment_moments(d, -inf, c, 0.0) : segment_moments(d, c, inf, 0.0);
}

std::string describe(const JumpDensity& d) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const MertonJumps& m) { os << "merton(mean=" << m.mean << ", stddev=" << m.stddev << ")"; },
                 [&](const KouJumps& k) {
                   os << "kou(p=" << k.p_up << ", eta_up=" << k.eta_up << ", eta_down=" << k.eta_down << ")";
                 },
             },
             d);
  return os.str();
}

}  // namespace swingpide
