#include "swingpide/linsolve.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace swingpide {

void SolverConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-4)) throw std::invalid_argument("solver rel_tol must lie in (0, 1e-4]");
  if (max_iter < 1) throw std::invalid_argument("solver max_iter must be at least 1");
  if (!(ilutp_drop >= 0.0)) throw std::invalid_argument("ILUTP drop tolerance must be non-negative");
  if (!(ilutp_pivot >= 0.0 && ilutp_pivot <= 1.0)) throw std::invalid_argument("ILUTP pivot threshold must lie in [0, 1]");
}

TridiagonalLU::TridiagonalLU(Vector lower, Vector diag, Vector upper) : lower_(std::move(lower)) {
  const Eigen::Index n = diag.size();
  if (lower_.size() != n || upper.size() != n) throw std::invalid_argument("tridiagonal factors: inconsistent sizes");
  c_.resize(n);
  inv_piv_.resize(n);
  double prev_c = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double piv = diag[i] - (i > 0 ? lower_[i] * prev_c : 0.0);
    if (std::abs(piv) <= 1e-300) throw SolverError("tridiagonal factors: singular pivot at row " + std::to_string(i));
    inv_piv_[i] = 1.0 / piv;
    c_[i] = i + 1 < n ? upper[i] * inv_piv_[i] : 0.0;
    prev_c = c_[i];
  }
}

TridiagonalLU TridiagonalLU::from_sparse(const SparseMatrix& m) {
  const Eigen::Index n = m.rows();
  Vector lo = Vector::Zero(n), di = Vector::Zero(n), up = Vector::Zero(n);
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      const Eigen::Index c = it.col();
      if (c == r) di[r] = it.value();
      else if (c == r - 1) lo[r] = it.value();
      else if (c == r + 1) up[r] = it.value();
      else if (it.value() != 0.0) throw std::invalid_argument("matrix is not tridiagonal");
    }
  }
  return TridiagonalLU(lo, di, up);
}

void TridiagonalLU::solve_in_place(Vector& rhs) const {
  const Eigen::Index n = size();
  if (rhs.size() != n) throw std::invalid_argument("tridiagonal solve: size mismatch");
  rhs[0] *= inv_piv_[0];
  for (Eigen::Index i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_piv_[i];
  for (Eigen::Index i = n - 1; i-- > 0;) rhs[i] -= c_[i] * rhs[i + 1];
}

void TridiagonalLU::solve_rows(RowMatrix& rhs) const {
  const Eigen::Index n = size();
  if (rhs.rows() != n) throw std::invalid_argument("tridiagonal solve: size mismatch");
  rhs.row(0) *= inv_piv_[0];
  for (Eigen::Index i = 1; i < n; ++i) rhs.row(i) = (rhs.row(i) - lower_[i] * rhs.row(i - 1)) * inv_piv_[i];
  for (Eigen::Index i = n - 1; i-- > 0;) rhs.row(i) -= c_[i] * rhs.row(i + 1);
}

Ilutp::Ilutp(const SparseMatrix& a, double drop_tol, double pivot_tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("ILUTP needs a square matrix");
  n_ = a.rows();
  const auto n = static_cast<std::size_t>(n_);
  perm_.resize(n);
  std::vector<Eigen::Index> iperm(n);
  for (std::size_t p = 0; p < n; ++p) perm_[p] = iperm[p] = static_cast<Eigen::Index>(p);

  std::vector<double> w(n, 0.0);
  std::vector<char> used(n, 0);
  std::vector<Eigen::Index> touched;
  std::priority_queue<Eigen::Index, std::vector<Eigen::Index>, std::greater<>> pending;

  l_ptr_.assign(1, 0);
  u_ptr_.assign(1, 0);
  u_diag_inv_.resize(n);
  const auto reserve = static_cast<std::size_t>(a.nonZeros());
  l_idx_.reserve(reserve);
  l_val_.reserve(reserve);
  u_idx_.reserve(reserve);
  u_val_.reserve(reserve);

  auto touch = [&](Eigen::Index p, Eigen::Index row) {
    if (!used[p]) {
      used[p] = 1;
      w[p] = 0.0;
      touched.push_back(p);
      if (p < row) pending.push(p);
    }
  };

  for (Eigen::Index i = 0; i < n_; ++i) {
    touched.clear();
    double norm2 = 0.0;
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      const Eigen::Index p = iperm[it.col()];
      touch(p, i);
      w[p] += it.value();
      norm2 += it.value() * it.value();
    }
    const double tau = drop_tol * std::sqrt(norm2);

    while (!pending.empty()) {
      const Eigen::Index k = pending.top();
      pending.pop();
      const double wk = w[k] * u_diag_inv_[k];
      if (std::abs(wk) < tau || wk == 0.0) {
        w[k] = 0.0;
        continue;
      }
      w[k] = wk;
      l_idx_.push_back(k);
      l_val_.push_back(wk);
      for (Eigen::Index e = u_ptr_[k]; e < u_ptr_[k + 1]; ++e) {
        const Eigen::Index p = iperm[u_idx_[e]];
        touch(p, i);
        w[p] -= wk * u_val_[e];
      }
    }
    l_ptr_.push_back(static_cast<Eigen::Index>(l_idx_.size()));

    Eigen::Index best = -1;
    double best_abs = 0.0;
    for (Eigen::Index p : touched) {
      if (p > i && std::abs(w[p]) >= tau && std::abs(w[p]) > best_abs) {
        best = p;
        best_abs = std::abs(w[p]);
      }
    }
    const double diag_abs = used[i] ? std::abs(w[i]) : 0.0;
    if (best >= 0 && diag_abs < pivot_tol * best_abs) {
      touch(i, i);
      std::swap(w[i], w[best]);
      std::swap(perm_[i], perm_[best]);
      iperm[perm_[i]] = i;
      iperm[perm_[best]] = best;
    }
    double diag = used[i] ? w[i] : 0.0;
    if (std::abs(diag) <= 1e-300) diag = tau > 0.0 ? tau : 1e-10;
    u_diag_inv_[i] = 1.0 / diag;
    for (Eigen::Index p : touched) {
      if (p > i && w[p] != 0.0 && std::abs(w[p]) >= tau) {
        u_idx_.push_back(perm_[p]);
        u_val_.push_back(w[p]);
      }
    }
    u_ptr_.push_back(static_cast<Eigen::Index>(u_idx_.size()));
    for (Eigen::Index p : touched) {
      used[p] = 0;
      w[p] = 0.0;
    }
  }
  for (auto& c : u_idx_) c = iperm[c];
}

void Ilutp::apply(const Vector& rhs, Vector& out) const {
  if (rhs.size() != n_) throw std::invalid_argument("ILUTP apply: size mismatch");
  Vector y(n_);
  for (Eigen::Index i = 0; i < n_; ++i) {
    double s = rhs[i];
    for (Eigen::Index e = l_ptr_[i]; e < l_ptr_[i + 1]; ++e) s -= l_val_[e] * y[l_idx_[e]];
    y[i] = s;
  }
  for (Eigen::Index i = n_ - 1; i >= 0; --i) {
    double s = y[i];
    for (Eigen::Index e = u_ptr_[i]; e < u_ptr_[i + 1]; ++e) s -= u_val_[e] * y[u_idx_[e]];
    y[i] = s * u_diag_inv_[i];
  }
  out.resize(n_);
  for (Eigen::Index p = 0; p < n_; ++p) out[perm_[p]] = y[p];
}

SparseMatrix Ilutp::lower() const {
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index i = 0; i < n_; ++i) {
    t.emplace_back(i, i, 1.0);
    for (Eigen::Index e = l_ptr_[i]; e < l_ptr_[i + 1]; ++e) t.emplace_back(i, l_idx_[e], l_val_[e]);
  }
  SparseMatrix m(n_, n_);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix Ilutp::upper() const {
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index i = 0; i < n_; ++i) {
    t.emplace_back(i, i, 1.0 / u_diag_inv_[i]);
    for (Eigen::Index e = u_ptr_[i]; e < u_ptr_[i + 1]; ++e) t.emplace_back(i, u_idx_[e], u_val_[e]);
  }
  SparseMatrix m(n_, n_);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::Index Ilutp::fill() const {
  return static_cast<Eigen::Index>(l_idx_.size() + u_idx_.size()) + n_;
}

PreconditionedSolver::PreconditionedSolver(SparseMatrix a, const SolverConfig& cfg) : a_(std::move(a)), cfg_(cfg) {
  cfg_.validate();
  if (a_.rows() != a_.cols()) throw std::invalid_argument("solver needs a square matrix");
  a_.makeCompressed();
  ilu_ = Ilutp(a_, cfg_.ilutp_drop, cfg_.ilutp_pivot);
}

namespace {

enum class Outcome { Converged, Breakdown, MaxIter };

Outcome bicgstab(const SparseMatrix& a, const Ilutp& m, const Vector& b, double bnorm, const SolverConfig& cfg,
                 Vector& x, int& iters) {
  Vector r = b - a * x;
  double rnorm = r.norm();
  if (rnorm <= cfg.rel_tol * bnorm) return Outcome::Converged;
  Vector r_hat = r;
  Vector p = Vector::Zero(b.size()), v = Vector::Zero(b.size());
  Vector p_hat(b.size()), s(b.size()), s_hat(b.size()), t(b.size());
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  const double tiny = 1e-300;
  while (iters < cfg.max_iter) {
    ++iters;
    const double rho_new = r_hat.dot(r);
    if (std::abs(rho_new) <= tiny || std::abs(rho_new) < 1e-30 * r_hat.norm() * rnorm) return Outcome::Breakdown;
    const double beta = (rho_new / rho) * (alpha / omega);
    p = r + beta * (p - omega * v);
    m.apply(p, p_hat);
    v.noalias() = a * p_hat;
    const double denom = r_hat.dot(v);
    if (std::abs(denom) <= tiny) return Outcome::Breakdown;
    alpha = rho_new / denom;
    s = r - alpha * v;
    if (s.norm() <= cfg.rel_tol * bnorm) {
      x += alpha * p_hat;
      r = b - a * x;
      rnorm = r.norm();
      if (rnorm <= cfg.rel_tol * bnorm) return Outcome::Converged;
      r_hat = r;
      p.setZero();
      v.setZero();
      rho = alpha = omega = 1.0;
      continue;
    }
    m.apply(s, s_hat);
    t.noalias() = a * s_hat;
    const double tt = t.squaredNorm();
    if (tt <= tiny) return Outcome::Breakdown;
    omega = t.dot(s) / tt;
    x += alpha * p_hat + omega * s_hat;
    r = s - omega * t;
    rnorm = r.norm();
    rho = rho_new;
    if (rnorm <= cfg.rel_tol * bnorm) {
      r = b - a * x;
      rnorm = r.norm();
      if (rnorm <= cfg.rel_tol * bnorm) return Outcome::Converged;
      r_hat = r;
      p.setZero();
      v.setZero();
      rho = alpha = omega = 1.0;
      continue;
    }
    if (omega == 0.0) return Outcome::Breakdown;
  }
  return Outcome::MaxIter;
}

}  // namespace

SolveResult PreconditionedSolver::solve(const Vector& rhs, const Vector& x0) const {
  if (rhs.size() != a_.rows()) throw std::invalid_argument("solver: rhs size mismatch");
  SolveResult res;
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    res.x = Vector::Zero(rhs.size());
    return res;
  }
  res.x = x0.size() == rhs.size() ? x0 : Vector::Zero(rhs.size());
  Outcome out = bicgstab(a_, ilu_, rhs, bnorm, cfg_, res.x, res.iterations);
  if (out == Outcome::Breakdown) {
    res.restarted = true;
    res.x.setZero();
    out = bicgstab(a_, ilu_, rhs, bnorm, cfg_, res.x, res.iterations);
  }
  res.relative_residual = (rhs - a_ * res.x).norm() / bnorm;
  if (out == Outcome::Breakdown)
    throw SolverError("BiCGSTAB breakdown after restart, relative residual " + std::to_string(res.relative_residual));
  if (out == Outcome::MaxIter || res.relative_residual > cfg_.rel_tol)
    throw SolverError("BiCGSTAB did not converge in " + std::to_string(cfg_.max_iter) +
                      " iterations, relative residual " + std::to_string(res.relative_residual));
  return res;
}

SolveResult precond_solve(const SparseMatrix& mat, const Vector& rhs, const SolverConfig& cfg, const Vector& x0) {
  return PreconditionedSolver(mat, cfg).solve(rhs, x0);
}

}  // namespace swingpide
