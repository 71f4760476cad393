#include "swingpide/discretize.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace swingpide {

std::string_view to_string(ConvectionScheme s) {
  switch (s) {
    case ConvectionScheme::Upwind2: return "upwind2";
    case ConvectionScheme::Quick: return "quick";
    case ConvectionScheme::Upwind3: return "upwind3";
    case ConvectionScheme::Central: return "central";
  }
  return "unknown";
}

ConvectionScheme parse_convection(std::string_view name) {
  if (name == "upwind2") return ConvectionScheme::Upwind2;
  if (name == "quick") return ConvectionScheme::Quick;
  if (name == "upwind3") return ConvectionScheme::Upwind3;
  if (name == "central") return ConvectionScheme::Central;
  throw std::invalid_argument("unknown convection scheme: " + std::string(name));
}

bool ConvectionWeights::satisfies_family_conditions(double tol) const {
  const double s0 = w_m1 + w0 + w1 + w2;
  const double s1 = -w_m1 + w1 + 2.0 * w2;
  const double s2 = w_m1 + w1 + 4.0 * w2;
  return std::abs(s0) <= tol && std::abs(s1 - 1.0) <= tol && std::abs(s2) <= tol && w2 <= 0.0;
}

double ConvectionWeights::abs_sum() const { return std::abs(w2) + std::abs(w1) + std::abs(w_m1) + w0; }

ConvectionWeights family_weights(ConvectionScheme s) {
  switch (s) {
    case ConvectionScheme::Upwind2: return {0.0, -1.5, 2.0, -0.5};
    case ConvectionScheme::Quick: return {-3.0 / 8.0, -3.0 / 8.0, 7.0 / 8.0, -1.0 / 8.0};
    case ConvectionScheme::Upwind3: return {-2.0 / 6.0, -3.0 / 6.0, 1.0, -1.0 / 6.0};
    case ConvectionScheme::Central: return {-0.5, 0.0, 0.5, 0.0};
  }
  throw std::invalid_argument("unknown convection scheme");
}

bool is_uniform(const Vector& nodes, double rel_tol) {
  if (nodes.size() < 3) return true;
  const double h = nodes[1] - nodes[0];
  for (Eigen::Index i = 1; i + 1 < nodes.size(); ++i)
    if (std::abs((nodes[i + 1] - nodes[i]) - h) > rel_tol * std::abs(h)) return false;
  return true;
}

namespace {

using Triplet = Eigen::Triplet<double>;

// Node coordinates extended past both ends. Under linear conditions ghost
// nodes continue the end spacing, so the ghost value extrapolation
// V_{-k} = (1+k) V_0 - k V_1 is exact for linear data at those coordinates.
class ExtendedAxis {
 public:
  ExtendedAxis(const Vector& nodes, BoundaryKind bc, double lower_bd, double upper_bd)
      : x_(nodes), bc_(bc), lower_(lower_bd), upper_(upper_bd) {
    if (x_.size() < 3) throw std::invalid_argument("axis needs at least three nodes");
    if (bc_ == BoundaryKind::Dirichlet && !(lower_ < x_[0] && upper_ > x_[x_.size() - 1]))
      throw std::invalid_argument("Dirichlet boundary nodes must lie outside the unknown nodes");
  }

  long n() const { return static_cast<long>(x_.size()); }

  double operator()(long k) const {
    const long last = n() - 1;
    if (k >= 0 && k <= last) return x_[k];
    if (bc_ == BoundaryKind::Linear) {
      if (k < 0) return x_[0] + k * (x_[1] - x_[0]);
      return x_[last] + (k - last) * (x_[last] - x_[last - 1]);
    }
    if (k == -1) return lower_;
    if (k == n()) return upper_;
    throw std::invalid_argument("stencil reaches beyond the Dirichlet boundary");
  }

  // Distributes weight w at extended index k onto unknown columns (and the
  // boundary couplings under Dirichlet conditions).
  void fold(long row, long k, double w, std::vector<Triplet>& trip, Eigen::MatrixX2d& bd) const {
    const long last = n() - 1;
    if (k >= 0 && k <= last) {
      trip.emplace_back(row, k, w);
      return;
    }
    if (bc_ == BoundaryKind::Linear) {
      if (k < 0) {
        trip.emplace_back(row, 0, w * (1 - k));
        trip.emplace_back(row, 1, w * k);
      } else {
        const long s = k - last;
        trip.emplace_back(row, last, w * (1 + s));
        trip.emplace_back(row, last - 1, -w * s);
      }
      return;
    }
    if (k == -1) {
      bd(row, 0) += w;
    } else if (k == n()) {
      bd(row, 1) += w;
    } else {
      throw std::invalid_argument("stencil reaches beyond the Dirichlet boundary");
    }
  }

 private:
  const Vector& x_;
  BoundaryKind bc_;
  double lower_;
  double upper_;
};

// Lagrange basis values at p for the nodes t.
std::array<double, 3> lagrange_values(const std::array<double, 3>& t, double p) {
  std::array<double, 3> l{};
  for (int k = 0; k < 3; ++k) {
    double v = 1.0;
    for (int m = 0; m < 3; ++m)
      if (m != k) v *= (p - t[m]) / (t[k] - t[m]);
    l[k] = v;
  }
  return l;
}

// Lagrange basis derivatives at p for the nodes t.
std::array<double, 3> lagrange_derivs(const std::array<double, 3>& t, double p) {
  std::array<double, 3> l{};
  for (int k = 0; k < 3; ++k) {
    double denom = 1.0;
    for (int m = 0; m < 3; ++m)
      if (m != k) denom *= t[k] - t[m];
    double num = 0.0;
    for (int m = 0; m < 3; ++m) {
      if (m == k) continue;
      double prod = 1.0;
      for (int q = 0; q < 3; ++q)
        if (q != k && q != m) prod *= p - t[q];
      num += prod;
    }
    l[k] = num / denom;
  }
  return l;
}

using Stencil = std::map<long, double>;

Stencil upwind2_stencil(const ExtendedAxis& X, long i, bool positive) {
  const long k0 = positive ? i : i - 2;
  const std::array<double, 3> t{X(k0), X(k0 + 1), X(k0 + 2)};
  const auto d = lagrange_derivs(t, X(i));
  return {{k0, d[0]}, {k0 + 1, d[1]}, {k0 + 2, d[2]}};
}

// Quadratic through nodes c-1, c, c+1 evaluated at p, accumulated into s with
// the given sign.
void add_quadratic(Stencil& s, const ExtendedAxis& X, long c, double p, double sign) {
  const std::array<double, 3> t{X(c - 1), X(c), X(c + 1)};
  const auto l = lagrange_values(t, p);
  for (int k = 0; k < 3; ++k) s[c - 1 + k] += sign * l[k];
}

Stencil quick_stencil(const ExtendedAxis& X, long i, bool positive) {
  const double east = 0.5 * (X(i) + X(i + 1));
  const double west = 0.5 * (X(i - 1) + X(i));
  Stencil s;
  if (positive) {
    add_quadratic(s, X, i + 1, east, 1.0);
    add_quadratic(s, X, i, west, -1.0);
  } else {
    add_quadratic(s, X, i, east, 1.0);
    add_quadratic(s, X, i - 1, west, -1.0);
  }
  for (auto& [k, w] : s) w /= east - west;
  return s;
}

Stencil family_stencil(const ConvectionWeights& w, double h, long i, bool positive) {
  if (positive) return {{i + 2, w.w2 / h}, {i + 1, w.w1 / h}, {i, w.w0 / h}, {i - 1, w.w_m1 / h}};
  return {{i + 1, -w.w_m1 / h}, {i, -w.w0 / h}, {i - 1, -w.w1 / h}, {i - 2, -w.w2 / h}};
}

SparseMatrix from_triplets(long rows, long cols, const std::vector<Triplet>& trip) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  m.prune(0.0);
  return m;
}

SparseMatrix kron_identity_right(const SparseMatrix& a, Eigen::Index n) {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros() * n));
  for (Eigen::Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it)
      for (Eigen::Index j = 0; j < n; ++j) trip.emplace_back(r * n + j, it.col() * n + j, it.value());
  SparseMatrix out(a.rows() * n, a.cols() * n);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SparseMatrix kron_identity_left(Eigen::Index n, const SparseMatrix& a) {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros() * n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index r = 0; r < a.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(a, r); it; ++it)
        trip.emplace_back(i * a.rows() + r, i * a.cols() + it.col(), it.value());
  SparseMatrix out(a.rows() * n, a.cols() * n);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Vector x_coefficients(const Grid2D& g, const ModelParams& p) {
  return (p.alpha * (p.mu - g.xs.array())).matrix();
}

Vector y_coefficients(const Grid2D& g, const ModelParams& p) { return (-p.beta * g.ys.array()).matrix(); }

}  // namespace

Operator1D second_derivative_1d(const Vector& nodes, BoundaryKind bc, double lower_bd, double upper_bd) {
  const ExtendedAxis X(nodes, bc, lower_bd, upper_bd);
  const long n = X.n();
  std::vector<Triplet> trip;
  Operator1D op;
  op.boundary = Eigen::MatrixX2d::Zero(n, 2);
  const long first = bc == BoundaryKind::Linear ? 1 : 0;
  const long last = bc == BoundaryKind::Linear ? n - 2 : n - 1;
  for (long i = first; i <= last; ++i) {
    const double hm = X(i) - X(i - 1);
    const double hp = X(i + 1) - X(i);
    X.fold(i, i - 1, 2.0 / (hm * (hm + hp)), trip, op.boundary);
    X.fold(i, i, -2.0 / (hm * hp), trip, op.boundary);
    X.fold(i, i + 1, 2.0 / (hp * (hm + hp)), trip, op.boundary);
  }
  op.interior = from_triplets(n, n, trip);
  return op;
}

Operator1D first_derivative_1d(const Vector& nodes, const Vector& coeff, ConvectionScheme scheme, BoundaryKind bc,
                               double lower_bd, double upper_bd) {
  if (coeff.size() != nodes.size()) throw std::invalid_argument("coefficient and node counts differ");
  const ExtendedAxis X(nodes, bc, lower_bd, upper_bd);
  const long n = X.n();
  const bool family = scheme == ConvectionScheme::Upwind3 || scheme == ConvectionScheme::Central;
  double h = 0.0;
  if (family) {
    Vector full = nodes;
    if (bc == BoundaryKind::Dirichlet) {
      full.resize(n + 2);
      full << lower_bd, nodes, upper_bd;
    }
    if (!is_uniform(full))
      throw std::invalid_argument(std::string(to_string(scheme)) + " convection requires a uniform mesh");
    h = nodes[1] - nodes[0];
  }
  const ConvectionWeights w = family_weights(scheme);

  std::vector<Triplet> trip;
  Operator1D op;
  op.boundary = Eigen::MatrixX2d::Zero(n, 2);
  for (long i = 0; i < n; ++i) {
    const double c = coeff[i];
    if (c == 0.0) continue;
    const bool positive = c >= 0.0;
    Stencil s;
    switch (scheme) {
      case ConvectionScheme::Upwind2: s = upwind2_stencil(X, i, positive); break;
      case ConvectionScheme::Quick: s = quick_stencil(X, i, positive); break;
      default: s = family_stencil(w, h, i, positive); break;
    }
    for (const auto& [k, wk] : s) X.fold(i, k, c * wk, trip, op.boundary);
  }
  op.interior = from_triplets(n, n, trip);
  return op;
}

SparseMatrix diffusion_operator(const Grid2D& g, const ModelParams& p, BoundaryKind bc) {
  const auto d2 = second_derivative_1d(g.xs, bc, g.domain.x_lo, g.domain.x_hi);
  SparseMatrix eye(g.nx(), g.nx());
  eye.setIdentity();
  const SparseMatrix ax = 0.5 * p.sigma * p.sigma * d2.interior - (p.r + p.lambda) * eye;
  return kron_identity_right(ax, g.ny());
}

SparseMatrix convection_operator(const Grid2D& g, const ModelParams& p, ConvectionScheme scheme, Axis axis,
                                 BoundaryKind bc) {
  if (axis == Axis::X) {
    const auto op = first_derivative_1d(g.xs, x_coefficients(g, p), scheme, bc, g.domain.x_lo, g.domain.x_hi);
    return kron_identity_right(op.interior, g.ny());
  }
  const auto op = first_derivative_1d(g.ys, y_coefficients(g, p), scheme, bc, g.domain.y_lo, g.domain.y_hi);
  return kron_identity_left(g.nx(), op.interior);
}

namespace {

// Btilde on an arbitrary ordered node list: row j integrates against
// f(xi - z_j) with linear interpolation between consecutive nodes.
Eigen::MatrixXd quadrature_block(const Vector& z, const JumpDensity& d, Eigen::MatrixXd* tail) {
  const Eigen::Index n = z.size();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double s = z[j];
    for (Eigen::Index l = 0; l + 1 < n; ++l) {
      const double h = z[l + 1] - z[l];
      const double ua = z[l] - s;
      const double ub = z[l + 1] - s;
      const Moments mom = segment_moments(d, ua, ub, 0.0);
      b(j, l) += (ub * mom.m0 - mom.m1) / h;
      b(j, l + 1) += (mom.m1 - ua * mom.m0) / h;
    }
    if (tail) {
      const double h0 = z[1] - z[0];
      const double u0 = z[0] - s;
      const Moments left = segment_moments(d, -inf, u0, 0.0);
      const double e_left = left.m1 - u0 * left.m0;
      (*tail)(j, 0) += left.m0 - e_left / h0;
      (*tail)(j, 1) += e_left / h0;

      const double hn = z[n - 1] - z[n - 2];
      const double un = z[n - 1] - s;
      const Moments right = segment_moments(d, un, inf, 0.0);
      const double e_right = right.m1 - un * right.m0;
      (*tail)(j, n - 1) += right.m0 + e_right / hn;
      (*tail)(j, n - 2) += -e_right / hn;
    }
  }
  return b;
}

}  // namespace

JumpBlock jump_operator(const Grid2D& g, const ModelParams& p, bool with_tail_correction, BoundaryKind bc) {
  const Eigen::Index ny = g.ny();
  JumpBlock out;
  out.boundary = Eigen::MatrixX2d::Zero(ny, 2);
  if (bc == BoundaryKind::Linear) {
    out.tail = Eigen::MatrixXd::Zero(ny, ny);
    out.plain = quadrature_block(g.ys, p.density, with_tail_correction ? &out.tail : nullptr);
    return out;
  }
  // Dirichlet: integrate over [y_min, y_max] with the boundary nodes as
  // quadrature nodes, keep the unknown rows and split off boundary columns.
  Vector z(ny + 2);
  z << g.domain.y_lo, g.ys, g.domain.y_hi;
  const Eigen::MatrixXd full = quadrature_block(z, p.density, nullptr);
  out.plain = full.block(1, 1, ny, ny);
  out.boundary.col(0) = full.block(1, 0, ny, 1);
  out.boundary.col(1) = full.block(1, ny + 1, ny, 1);
  out.tail = Eigen::MatrixXd::Zero(ny, ny);
  return out;
}

void OperatorSet::apply_jump(const Vector& v, Vector& out) const {
  out.resize(size());
  if (lambda == 0.0) {
    out.setZero();
    return;
  }
  Eigen::Map<const RowMatrix> vm(v.data(), nx, ny);
  Eigen::Map<RowMatrix> om(out.data(), nx, ny);
  om.noalias() = vm * jump_block_t;
  out *= lambda;
}

Vector OperatorSet::apply_jump(const Vector& v) const {
  Vector out;
  apply_jump(v, out);
  return out;
}

Vector OperatorSet::boundary_source(const DirichletData& data, double t) const {
  Vector g = Vector::Zero(size());
  if (boundary != BoundaryKind::Dirichlet) return g;
  for (Eigen::Index i = 0; i < nx; ++i) {
    const double ylo = data.y_lower(xs[i], t);
    const double yhi = data.y_upper(xs[i], t);
    for (Eigen::Index j = 0; j < ny; ++j) {
      double v = bd_x(i, 0) * data.x_lower(ys[j], t) + bd_x(i, 1) * data.x_upper(ys[j], t);
      v += (bd_y(j, 0) + lambda * bd_jump(j, 0)) * ylo + (bd_y(j, 1) + lambda * bd_jump(j, 1)) * yhi;
      g[i * ny + j] = v;
    }
  }
  return g;
}

OperatorSet assemble(const Grid2D& g, const ModelParams& p, ConvectionScheme scheme, BoundaryKind bc,
                     bool with_tail_correction) {
  if (g.nx() < 3 || g.ny() < 3) throw std::invalid_argument("grid too small to assemble operators");
  if (static_cast<Eigen::Index>(g.roi_mask.size()) != g.size())
    throw std::invalid_argument("grid mask does not match the node count");
  OperatorSet ops;
  ops.nx = g.nx();
  ops.ny = g.ny();
  ops.xs = g.xs;
  ops.ys = g.ys;
  ops.lambda = p.lambda;
  ops.boundary = bc;
  ops.scheme = scheme;

  const auto d2 = second_derivative_1d(g.xs, bc, g.domain.x_lo, g.domain.x_hi);
  SparseMatrix eye(g.nx(), g.nx());
  eye.setIdentity();
  const double half_var = 0.5 * p.sigma * p.sigma;
  ops.a_diff = kron_identity_right(SparseMatrix(half_var * d2.interior - (p.r + p.lambda) * eye), g.ny());

  const auto cx = first_derivative_1d(g.xs, x_coefficients(g, p), scheme, bc, g.domain.x_lo, g.domain.x_hi);
  const auto cy = first_derivative_1d(g.ys, y_coefficients(g, p), scheme, bc, g.domain.y_lo, g.domain.y_hi);
  ops.a_conv_x = kron_identity_right(cx.interior, g.ny());
  ops.a_conv_y = kron_identity_left(g.nx(), cy.interior);
  ops.a = ops.a_diff + ops.a_conv_x + ops.a_conv_y;
  ops.a.prune(0.0);

  const bool tail = with_tail_correction && bc == BoundaryKind::Linear;
  const JumpBlock jb = jump_operator(g, p, tail, bc);
  ops.jump_plain = jb.plain;
  ops.jump_block = jb.effective();
  ops.jump_block_t = ops.jump_block.transpose();

  ops.bd_x = half_var * d2.boundary + cx.boundary;
  ops.bd_y = cy.boundary;
  ops.bd_jump = jb.boundary;
  return ops;
}

}  // namespace swingpide
