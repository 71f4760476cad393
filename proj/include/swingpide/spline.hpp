#pragma once

#include "swingpide/discretize.hpp"

#include <Eigen/Core>

namespace swingpide {

/// Coefficients of s(t) = a0 f_i + a1 f_{i+1} + c0 M_i + c1 M_{i+1} for a
/// cubic spline with nodal values f and second derivatives M. Outside the
/// node range the spline continues linearly with its end slope.
struct SplineWeights {
  Eigen::Index i = 0;
  double a0 = 0.0;
  double a1 = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
};

SplineWeights spline_weights(const Vector& nodes, double t);

/// Dense map from nodal values to natural-spline second derivatives.
Eigen::MatrixXd natural_spline_moment_matrix(const Vector& nodes);

/// Second derivatives of the natural cubic spline through (nodes, values).
Vector natural_spline_moments(const Vector& nodes, const Vector& values);

double spline_eval(const Vector& nodes, const Vector& values, const Vector& moments, double t);

/// S with (S f)_k = s_f(targets_k) for the natural cubic spline s_f.
Eigen::MatrixXd spline_interpolation_matrix(const Vector& nodes, const Vector& targets);

/// Natural bicubic spline on a tensor grid, stored as the nodal values and
/// the mixed second-derivative tables F_xx, F_yy, F_xxyy.
class SplineSurface {
 public:
  SplineSurface(Vector xs, Vector ys, const RowMatrix& values);

  double operator()(double x, double y) const;

  /// Values at all (tx_a, ty_b), as a row-major (|tx| x |ty|) block.
  RowMatrix evaluate_tensor(const Vector& tx, const Vector& ty) const;

  const RowMatrix& values() const { return f_; }

 private:
  Vector xs_;
  Vector ys_;
  RowMatrix f_;
  RowMatrix fxx_;
  RowMatrix fyy_;
  RowMatrix fxxyy_;
};

}  // namespace swingpide
