#pragma once

#include "swingpide/grid.hpp"
#include "swingpide/model.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <string>
#include <string_view>

namespace swingpide {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ConvectionScheme { Upwind2, Quick, Upwind3, Central };
enum class BoundaryKind { Linear, Dirichlet };
enum class Axis { X, Y };

std::string_view to_string(ConvectionScheme s);
ConvectionScheme parse_convection(std::string_view name);

/// Uniform-grid weights of the upwind-biased family
///   a^+ (w2 V_{i+2} + w1 V_{i+1} + w0 V_i + w_{-1} V_{i-1}) / h
///   + a^- (-w_{-1} V_{i+1} - w0 V_i - w1 V_{i-1} - w2 V_{i-2}) / h.
struct ConvectionWeights {
  double w_m1 = 0.0;
  double w0 = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;

  /// sum w = 0, sum k w = 1, sum k^2 w = 0 and w2 <= 0.
  bool satisfies_family_conditions(double tol = 1e-14) const;
  double abs_sum() const;  ///< |w2| + |w1| + |w_{-1}| + w0
};

ConvectionWeights family_weights(ConvectionScheme s);

bool is_uniform(const Vector& nodes, double rel_tol = 1e-9);

/// A one-dimensional operator on the unknown nodes. Under Dirichlet
/// conditions `boundary` holds the couplings to the lower and upper boundary
/// values (columns 0 and 1); under linear conditions it is zero.
struct Operator1D {
  SparseMatrix interior;
  Eigen::MatrixX2d boundary;
};

/// Central three-point second derivative. Linear conditions zero the first
/// and last rows; Dirichlet conditions couple to nodes at `lower_bd` and
/// `upper_bd`.
Operator1D second_derivative_1d(const Vector& nodes, BoundaryKind bc, double lower_bd = 0.0,
                                double upper_bd = 0.0);

/// diag(coeff) * (first-derivative matrix), the upwind direction of each row
/// taken from the sign of coeff (zero counts as positive). Ghost values
/// beyond the mesh under linear conditions are linear extrapolations.
Operator1D first_derivative_1d(const Vector& nodes, const Vector& coeff, ConvectionScheme scheme,
                               BoundaryKind bc, double lower_bd = 0.0, double upper_bd = 0.0);

/// (sigma^2/2 D2 - (r + lambda) I1) (x) I2.
SparseMatrix diffusion_operator(const Grid2D& g, const ModelParams& p, BoundaryKind bc);

/// D_x Atilde_x (x) I2 for Axis::X, I1 (x) D_y Atilde_y for Axis::Y.
SparseMatrix convection_operator(const Grid2D& g, const ModelParams& p, ConvectionScheme scheme, Axis axis,
                                 BoundaryKind bc);

/// Dense jump quadrature block Btilde (ny x ny, without the factor lambda).
struct JumpBlock {
  Eigen::MatrixXd plain;     ///< linear-interpolation quadrature over the truncated domain
  Eigen::MatrixXd tail;      ///< extra weights from linearly extrapolated tails (zero if disabled)
  Eigen::MatrixX2d boundary; ///< Dirichlet couplings to the y boundary values
  Eigen::MatrixXd effective() const { return plain + tail; }
};

JumpBlock jump_operator(const Grid2D& g, const ModelParams& p, bool with_tail_correction,
                        BoundaryKind bc = BoundaryKind::Linear);

/// Dirichlet data: x_lower(y, t) = v(x_min, y, t) and so on.
struct DirichletData {
  std::function<double(double, double)> x_lower;
  std::function<double(double, double)> x_upper;
  std::function<double(double, double)> y_lower;
  std::function<double(double, double)> y_upper;
};

struct OperatorSet {
  SparseMatrix a_diff;
  SparseMatrix a_conv_x;
  SparseMatrix a_conv_y;
  SparseMatrix a;                ///< a_diff + a_conv_x + a_conv_y
  Eigen::MatrixXd jump_block;    ///< Btilde used for time stepping
  Eigen::MatrixXd jump_block_t;  ///< its transpose, cached for the row-major product
  Eigen::MatrixXd jump_plain;    ///< Btilde without tail correction
  double lambda = 0.0;
  BoundaryKind boundary = BoundaryKind::Linear;
  ConvectionScheme scheme = ConvectionScheme::Quick;
  Eigen::Index nx = 0;
  Eigen::Index ny = 0;
  Vector xs;
  Vector ys;

  // Dirichlet couplings (zero under linear conditions).
  Eigen::MatrixX2d bd_x;     ///< nx x 2 couplings of rows i to x_lower / x_upper
  Eigen::MatrixX2d bd_y;     ///< ny x 2 convection couplings to y_lower / y_upper
  Eigen::MatrixX2d bd_jump;  ///< ny x 2 jump couplings (without lambda)

  Eigen::Index size() const { return nx * ny; }

  /// out = B v with B = I1 (x) lambda * Btilde.
  void apply_jump(const Vector& v, Vector& out) const;
  Vector apply_jump(const Vector& v) const;

  /// g(t): contribution of the Dirichlet data to dV/dt.
  Vector boundary_source(const DirichletData& data, double t) const;
};

OperatorSet assemble(const Grid2D& g, const ModelParams& p, ConvectionScheme scheme, BoundaryKind bc,
                     bool with_tail_correction = true);

}  // namespace swingpide
