#include "swingpide/grid.hpp"

#include "swingpide/model.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace swingpide {

void MeshSpec::validate() const {
  if (m < 4) throw std::invalid_argument("mesh resolution m must be at least 4");
  if (!(lo < k_lo && k_lo < k_hi && k_hi < hi))
    throw std::invalid_argument("mesh bounds must satisfy lo < k_lo < k_hi < hi");
  if (!(d > 0.0)) throw std::invalid_argument("mesh stretching parameter d must be positive");
}

Vector build_mesh(const MeshSpec& s) {
  s.validate();
  const double xi_lo_int = s.k_lo / s.d;
  const double xi_hi_int = s.k_hi / s.d;
  const double xi_min = xi_lo_int + std::asinh(s.lo / s.d - xi_lo_int);
  const double xi_max = xi_hi_int + std::asinh(s.hi / s.d - xi_hi_int);
  const double dxi = (xi_max - xi_min) / s.m;

  Vector x(s.m + 1);
  int uniform_nodes = 0;
  for (int i = 0; i <= s.m; ++i) {
    const double xi = xi_min + i * dxi;
    if (xi <= xi_lo_int) {
      x[i] = s.k_lo + s.d * std::sinh(xi - xi_lo_int);
    } else if (xi < xi_hi_int) {
      x[i] = x[i - 1] + s.d * dxi;
      ++uniform_nodes;
    } else {
      x[i] = s.k_hi + s.d * std::sinh(xi - xi_hi_int);
    }
  }
  if (uniform_nodes < 2)
    throw std::invalid_argument("mesh resolution too small to resolve the uniform region");
  x[0] = s.lo;
  x[s.m] = s.hi;
  for (int i = 0; i < s.m; ++i)
    if (!(x[i + 1] > x[i])) throw std::logic_error("generated mesh is not strictly increasing");
  return x;
}

std::size_t Grid2D::roi_count() const {
  std::size_t n = 0;
  for (bool b : roi_mask) n += b ? 1 : 0;
  return n;
}

Rect region_of_interest(double strike) { return {-0.5 * strike, 1.5 * strike, -strike, strike}; }

namespace {

void fill_roi(Grid2D& g) {
  g.roi_mask.assign(static_cast<std::size_t>(g.size()), false);
  for (Eigen::Index i = 0; i < g.nx(); ++i)
    for (Eigen::Index j = 0; j < g.ny(); ++j)
      g.roi_mask[static_cast<std::size_t>(g.index(i, j))] = g.roi.contains(g.xs[i], g.ys[j]);
}

}  // namespace

Grid2D make_sinh_grid(const Domain& dom, int m1, int m2, double strike, double d) {
  if (d <= 0.0) d = strike / 5.0;
  Grid2D g;
  g.xs = build_mesh({m1, dom.x_min, dom.x_max, -0.5 * strike, 1.5 * strike, d});
  g.ys = build_mesh({m2, dom.y_min, dom.y_max, -strike, strike, d});
  g.domain = {dom.x_min, dom.x_max, dom.y_min, dom.y_max};
  g.roi = region_of_interest(strike);
  fill_roi(g);
  return g;
}

Grid2D make_uniform_dirichlet_grid(const Domain& dom, int m1, int m2, double strike) {
  if (m1 < 4 || m2 < 4) throw std::invalid_argument("Dirichlet grid needs m >= 4");
  Grid2D g;
  const double hx = (dom.x_max - dom.x_min) / (m1 + 2);
  const double hy = (dom.y_max - dom.y_min) / (m2 + 2);
  g.xs = Vector::LinSpaced(m1 + 1, dom.x_min + hx, dom.x_max - hx);
  g.ys = Vector::LinSpaced(m2 + 1, dom.y_min + hy, dom.y_max - hy);
  g.domain = {dom.x_min, dom.x_max, dom.y_min, dom.y_max};
  g.roi = region_of_interest(strike);
  fill_roi(g);
  return g;
}

Grid2D make_uniform_grid(const Domain& dom, int m1, int m2, double strike) {
  if (m1 < 4 || m2 < 4) throw std::invalid_argument("uniform grid needs m >= 4");
  Grid2D g;
  g.xs = Vector::LinSpaced(m1 + 1, dom.x_min, dom.x_max);
  g.ys = Vector::LinSpaced(m2 + 1, dom.y_min, dom.y_max);
  g.domain = {dom.x_min, dom.x_max, dom.y_min, dom.y_max};
  g.roi = region_of_interest(strike);
  fill_roi(g);
  return g;
}

namespace {

// Cell edges: midpoints between nodes, mirrored about the first and last node.
Vector cell_edges(const Vector& x) {
  const auto n = x.size();
  Vector e(n + 1);
  for (Eigen::Index i = 1; i < n; ++i) e[i] = 0.5 * (x[i - 1] + x[i]);
  e[0] = 2.0 * x[0] - e[1];
  e[n] = 2.0 * x[n - 1] - e[n - 1];
  return e;
}

double ramp_primitive(double x, double y, double strike) {
  const double s = std::max(x + y - strike, 0.0);
  return s * s * s / 6.0;
}

}  // namespace

Vector cell_average_payoff(const Grid2D& g, double strike) {
  const Vector ex = cell_edges(g.xs);
  const Vector ey = cell_edges(g.ys);
  Vector v(g.size());
  for (Eigen::Index i = 0; i < g.nx(); ++i) {
    for (Eigen::Index j = 0; j < g.ny(); ++j) {
      const double x1 = ex[i], x2 = ex[i + 1], y1 = ey[j], y2 = ey[j + 1];
      double value = payoff(g.xs[i], g.ys[j], strike);
      if (x1 + y1 <= strike && strike < x2 + y2) {
        const double integral = ramp_primitive(x2, y2, strike) - ramp_primitive(x1, y2, strike) -
                                ramp_primitive(x2, y1, strike) + ramp_primitive(x1, y1, strike);
        value = integral / ((x2 - x1) * (y2 - y1));
      }
      v[g.index(i, j)] = value;
    }
  }
  return v;
}

Vector nodal_payoff(const Grid2D& g, double strike) {
  Vector v(g.size());
  for (Eigen::Index i = 0; i < g.nx(); ++i)
    for (Eigen::Index j = 0; j < g.ny(); ++j) v[g.index(i, j)] = payoff(g.xs[i], g.ys[j], strike);
  return v;
}

void write_grid_csv(std::ostream& os, const Grid2D& g) {
  os << "axis,coordinate\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < g.nx(); ++i) os << "x," << g.xs[i] << '\n';
  for (Eigen::Index j = 0; j < g.ny(); ++j) os << "y," << g.ys[j] << '\n';
}

}  // namespace swingpide
