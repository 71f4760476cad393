#pragma once

#include "swingpide/discretize.hpp"
#include "swingpide/grid.hpp"
#include "swingpide/model.hpp"

#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace swingpide::oracle {

// Largest residuals of the polynomial invariants of a 1D convection
// operator diag(coeff) D, relative to max |coeff u'|.
struct Exactness {
  double constant = 0.0;
  double linear = 0.0;
  double quadratic = 0.0;
  int quadratic_rows = 0;
};

inline bool locally_uniform(const Vector& x, Eigen::Index i) {
  const double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
  return std::abs(hp - hm) <= 1e-9 * std::max(hp, hm);
}

inline Exactness convection_exactness(const Vector& x, const Vector& coeff, ConvectionScheme scheme) {
  const Operator1D op = first_derivative_1d(x, coeff, scheme, BoundaryKind::Linear);
  const Eigen::Index n = x.size();
  const double scale = x.cwiseAbs().maxCoeff();
  Exactness e;

  const Vector one = Vector::Ones(n);
  e.constant = (op.interior * one).cwiseAbs().maxCoeff() / (coeff.cwiseAbs().maxCoeff() / scale);

  const Vector lin = (3.0 * x.array() / scale - 7.0).matrix();
  const Vector dlin = (coeff.array() * 3.0 / scale).matrix();
  e.linear = (op.interior * lin - dlin).cwiseAbs().maxCoeff() / dlin.cwiseAbs().maxCoeff();

  // rows whose stencils stay on the mesh; QUICK is exact for quadratics only
  // where the two neighbouring gaps agree
  const double c = x.mean();
  const Vector quad = ((x.array() - c) / scale).square().matrix();
  const Vector dquad = (coeff.array() * 2.0 * (x.array() - c) / (scale * scale)).matrix();
  const Vector got = op.interior * quad;
  const double ref = dquad.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 2; i + 2 < n; ++i) {
    if (scheme == ConvectionScheme::Quick && !locally_uniform(x, i)) continue;
    e.quadratic = std::max(e.quadratic, std::abs(got[i] - dquad[i]) / ref);
    ++e.quadratic_rows;
  }
  return e;
}

inline Vector x_coefficients_of(const Grid2D& g, const ModelParams& p) {
  return (p.alpha * (p.mu - g.xs.array())).matrix();
}

inline Vector y_coefficients_of(const Grid2D& g, const ModelParams& p) { return (-p.beta * g.ys.array()).matrix(); }

// max_j |(lambda Btilde v)_j - lambda int_{y_min}^{y_max} v(xi) f(xi - y_j) dxi|
// for the untruncated-tail block and a Gaussian test function.
inline double jump_action_error(const Grid2D& g, const ModelParams& p) {
  const JumpBlock jb = jump_operator(g, p, false);
  auto v = [](double y) { return std::exp(-std::pow((y - 30.0) / 150.0, 2)); };
  Vector vv(g.ny());
  for (Eigen::Index j = 0; j < g.ny(); ++j) vv[j] = v(g.ys[j]);
  const Vector got = p.lambda * (jb.plain * vv);
  const GaussKronrod gk(1e-14, 1e-13);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < g.ny(); ++j) {
    const double yj = g.ys[j];
    auto integrand = [&](double xi) { return v(xi) * density_pdf(p.density, xi - yj); };
    // panel edges at the kink of a Kou density and around its peak
    std::vector<double> cuts{g.domain.y_lo, g.domain.y_hi};
    for (double c : {yj, yj + density_mean(p.density), 30.0})
      if (c > g.domain.y_lo && c < g.domain.y_hi) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    double q = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) q += gk.integrate(integrand, cuts[k], cuts[k + 1]);
    worst = std::max(worst, std::abs(got[j] - p.lambda * q));
  }
  return worst;
}

// Least-squares slope of log(error) against log(m), negated.
inline double observed_order(const std::vector<std::pair<double, double>>& m_err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [m, e] : m_err) {
    const double lx = std::log(m), ly = std::log(e);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(m_err.size());
  return -(sxy - sx * sy / n) / (sxx - sx * sx / n);
}

}  // namespace swingpide::oracle
