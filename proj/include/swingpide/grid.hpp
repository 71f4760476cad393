#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <vector>

namespace swingpide {

using Vector = Eigen::VectorXd;

/// One axis of the sinh-stretched mesh: uniform with spacing d * dxi on
/// [k_lo, k_hi], sinh-stretched towards [lo, hi].
struct MeshSpec {
  int m = 100;
  double lo = -1.0;
  double hi = 1.0;
  double k_lo = -0.5;
  double k_hi = 0.5;
  double d = 0.1;

  void validate() const;
};

/// Node coordinates x_0 = lo < ... < x_m = hi.
Vector build_mesh(const MeshSpec& spec);

/// Axis-aligned rectangle [x_lo, x_hi] x [y_lo, y_hi].
struct Rect {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;

  bool contains(double x, double y, double tol = 1e-9) const {
    return x >= x_lo - tol && x <= x_hi + tol && y >= y_lo - tol && y <= y_hi + tol;
  }
};

/// Tensor-product grid. Values live in vectors indexed i * ny() + j, which
/// is a row-major (nx x ny) layout.
///
/// `domain` holds the truncated computational domain. For linear boundary
/// conditions it coincides with the first and last nodes; for the Dirichlet
/// harness the nodes are the interior unknowns and the domain edges are the
/// boundary nodes.
struct Grid2D {
  Vector xs;
  Vector ys;
  Rect domain;
  Rect roi;
  std::vector<bool> roi_mask;

  Eigen::Index nx() const { return xs.size(); }
  Eigen::Index ny() const { return ys.size(); }
  Eigen::Index size() const { return nx() * ny(); }
  Eigen::Index index(Eigen::Index i, Eigen::Index j) const { return i * ny() + j; }
  double dx(Eigen::Index i) const { return xs[i + 1] - xs[i]; }
  double dy(Eigen::Index j) const { return ys[j + 1] - ys[j]; }
  std::size_t roi_count() const;
};

/// Computational domain of the pricing problem.
struct Domain {
  double x_min = -100.0;
  double x_max = 250.0;
  double y_min = -750.0;
  double y_max = 750.0;
};

/// Region of financial interest [-K/2, 3K/2] x [-K, K].
Rect region_of_interest(double strike);

/// Sinh grid with uniform region [-K/2, 3K/2] in x and [-K, K] in y.
/// `d <= 0` selects the default K/5.
Grid2D make_sinh_grid(const Domain& domain, int m1, int m2, double strike, double d = 0.0);

/// Uniform grid of interior unknowns for the Dirichlet analysis harness:
/// m1 + 1 nodes strictly inside [x_min, x_max] with x_min and x_max acting as
/// the boundary nodes.
Grid2D make_uniform_dirichlet_grid(const Domain& domain, int m1, int m2, double strike);

/// Uniform grid including the domain edges as nodes (linear boundary
/// conditions on a uniform mesh).
Grid2D make_uniform_grid(const Domain& domain, int m1, int m2, double strike);

/// Initial vector: payoff at nodes, replaced by the exact cell average of
/// max(x + y - K, 0) on cells met by the strike line x + y = K. The cell of a
/// node is bounded by the midpoints to its neighbours; at the first and last
/// node the half cell is mirrored.
Vector cell_average_payoff(const Grid2D& g, double strike);

/// Pointwise payoff at every node.
Vector nodal_payoff(const Grid2D& g, double strike);

/// Writes "axis,coordinate" rows for both axes.
void write_grid_csv(std::ostream& os, const Grid2D& g);

}  // namespace swingpide
