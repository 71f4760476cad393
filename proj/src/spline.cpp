#include "swingpide/spline.hpp"

#include "swingpide/linsolve.hpp"

#include <algorithm>
#include <stdexcept>

namespace swingpide {

SplineWeights spline_weights(const Vector& x, double t) {
  const Eigen::Index n = x.size();
  if (n < 2) throw std::invalid_argument("spline needs at least two nodes");
  SplineWeights w;
  if (t <= x[0]) {
    const double h = x[1] - x[0];
    const double dt = t - x[0];
    w.i = 0;
    w.a0 = 1.0 - dt / h;
    w.a1 = dt / h;
    w.c0 = -dt * h / 3.0;
    w.c1 = -dt * h / 6.0;
    return w;
  }
  if (t >= x[n - 1]) {
    const double h = x[n - 1] - x[n - 2];
    const double dt = t - x[n - 1];
    w.i = n - 2;
    w.a0 = -dt / h;
    w.a1 = 1.0 + dt / h;
    w.c0 = dt * h / 6.0;
    w.c1 = dt * h / 3.0;
    return w;
  }
  const auto it = std::upper_bound(x.data(), x.data() + n, t);
  w.i = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(it - x.data()) - 1, 0, n - 2);
  const double h = x[w.i + 1] - x[w.i];
  const double a = (x[w.i + 1] - t) / h;
  const double b = 1.0 - a;
  w.a0 = a;
  w.a1 = b;
  w.c0 = (a * a * a - a) * h * h / 6.0;
  w.c1 = (b * b * b - b) * h * h / 6.0;
  return w;
}

Eigen::MatrixXd natural_spline_moment_matrix(const Vector& x) {
  const Eigen::Index n = x.size();
  if (n < 2) throw std::invalid_argument("spline needs at least two nodes");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  if (n == 2) return m;
  const Eigen::Index k = n - 2;
  Vector lo(k), di(k), up(k);
  RowMatrix rhs = RowMatrix::Zero(k, n);
  for (Eigen::Index r = 0; r < k; ++r) {
    const Eigen::Index i = r + 1;
    const double hm = x[i] - x[i - 1];
    const double hp = x[i + 1] - x[i];
    lo[r] = hm;
    di[r] = 2.0 * (hm + hp);
    up[r] = hp;
    rhs(r, i - 1) = 6.0 / hm;
    rhs(r, i) = -6.0 / hm - 6.0 / hp;
    rhs(r, i + 1) = 6.0 / hp;
  }
  TridiagonalLU(lo, di, up).solve_rows(rhs);
  m.middleRows(1, k) = rhs;
  return m;
}

Vector natural_spline_moments(const Vector& x, const Vector& f) {
  if (x.size() != f.size()) throw std::invalid_argument("spline: node and value counts differ");
  const Eigen::Index n = x.size();
  Vector m = Vector::Zero(n);
  if (n <= 2) return m;
  const Eigen::Index k = n - 2;
  Vector lo(k), di(k), up(k), rhs(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    const Eigen::Index i = r + 1;
    const double hm = x[i] - x[i - 1];
    const double hp = x[i + 1] - x[i];
    lo[r] = hm;
    di[r] = 2.0 * (hm + hp);
    up[r] = hp;
    rhs[r] = 6.0 * ((f[i + 1] - f[i]) / hp - (f[i] - f[i - 1]) / hm);
  }
  TridiagonalLU(lo, di, up).solve_in_place(rhs);
  m.segment(1, k) = rhs;
  return m;
}

double spline_eval(const Vector& x, const Vector& f, const Vector& m, double t) {
  const SplineWeights w = spline_weights(x, t);
  return w.a0 * f[w.i] + w.a1 * f[w.i + 1] + w.c0 * m[w.i] + w.c1 * m[w.i + 1];
}

Eigen::MatrixXd spline_interpolation_matrix(const Vector& nodes, const Vector& targets) {
  const Eigen::MatrixXd mom = natural_spline_moment_matrix(nodes);
  Eigen::MatrixXd s(targets.size(), nodes.size());
  for (Eigen::Index k = 0; k < targets.size(); ++k) {
    const SplineWeights w = spline_weights(nodes, targets[k]);
    s.row(k) = w.c0 * mom.row(w.i) + w.c1 * mom.row(w.i + 1);
    s(k, w.i) += w.a0;
    s(k, w.i + 1) += w.a1;
  }
  return s;
}

SplineSurface::SplineSurface(Vector xs, Vector ys, const RowMatrix& values)
    : xs_(std::move(xs)), ys_(std::move(ys)), f_(values) {
  if (f_.rows() != xs_.size() || f_.cols() != ys_.size())
    throw std::invalid_argument("spline surface: value table does not match the grid");
  const Eigen::MatrixXd mx = natural_spline_moment_matrix(xs_);
  const Eigen::MatrixXd my = natural_spline_moment_matrix(ys_);
  fxx_ = mx * f_;
  fyy_ = f_ * my.transpose();
  fxxyy_ = mx * fyy_;
}

double SplineSurface::operator()(double x, double y) const {
  const SplineWeights wx = spline_weights(xs_, x);
  const SplineWeights wy = spline_weights(ys_, y);
  const double ax[2] = {wx.a0, wx.a1}, cx[2] = {wx.c0, wx.c1};
  const double ay[2] = {wy.a0, wy.a1}, cy[2] = {wy.c0, wy.c1};
  double s = 0.0;
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      const Eigen::Index i = wx.i + p, j = wy.i + q;
      s += ax[p] * ay[q] * f_(i, j) + cx[p] * ay[q] * fxx_(i, j) + ax[p] * cy[q] * fyy_(i, j) +
           cx[p] * cy[q] * fxxyy_(i, j);
    }
  }
  return s;
}

RowMatrix SplineSurface::evaluate_tensor(const Vector& tx, const Vector& ty) const {
  const Eigen::MatrixXd sx = spline_interpolation_matrix(xs_, tx);
  const Eigen::MatrixXd sy = spline_interpolation_matrix(ys_, ty);
  return sx * f_ * sy.transpose();
}

}  // namespace swingpide
