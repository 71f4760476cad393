#pragma once

#include "swingpide/discretize.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace swingpide {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  double rel_tol = 1e-10;
  int max_iter = 500;
  double ilutp_drop = 1e-3;
  double ilutp_pivot = 0.1;

  void validate() const;
};

/// Thomas algorithm for a tridiagonal system. `lower[i]` multiplies x[i-1]
/// in row i (lower[0] unused), `upper[i]` multiplies x[i+1] (upper[n-1]
/// unused).
template <class Scalar>
std::vector<Scalar> solve_tridiagonal(const std::vector<Scalar>& lower, const std::vector<Scalar>& diag,
                                      const std::vector<Scalar>& upper, const std::vector<Scalar>& rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n)
    throw std::invalid_argument("tridiagonal system: inconsistent sizes");
  std::vector<Scalar> c(n), x(n);
  Scalar piv = diag[0];
  if (std::abs(piv) <= Scalar(1e-300)) throw SolverError("tridiagonal system: singular pivot at row 0");
  c[0] = n > 1 ? upper[0] / piv : Scalar(0);
  x[0] = rhs[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = diag[i] - lower[i] * c[i - 1];
    if (std::abs(piv) <= Scalar(1e-300))
      throw SolverError("tridiagonal system: singular pivot at row " + std::to_string(i));
    c[i] = i + 1 < n ? upper[i] / piv : Scalar(0);
    x[i] = (rhs[i] - lower[i] * x[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

/// LU factors of a tridiagonal matrix, reused for many right-hand sides.
/// `solve_rows` treats each column of a row-major (n x k) block as a
/// separate right-hand side.
class TridiagonalLU {
 public:
  TridiagonalLU() = default;
  TridiagonalLU(Vector lower, Vector diag, Vector upper);

  /// Extracts the tridiagonal part of a sparse matrix (entries outside the
  /// three bands must be absent).
  static TridiagonalLU from_sparse(const SparseMatrix& m);

  Eigen::Index size() const { return inv_piv_.size(); }
  void solve_in_place(Vector& rhs) const;
  void solve_rows(RowMatrix& rhs) const;

 private:
  Vector lower_;
  Vector c_;
  Vector inv_piv_;
};

/// Incomplete LU with threshold dropping and column pivoting. A Q = L U with
/// L unit lower triangular and Q the permutation given by `perm` (position p
/// holds original column perm[p]).
class Ilutp {
 public:
  Ilutp() = default;
  Ilutp(const SparseMatrix& a, double drop_tol, double pivot_tol);

  Eigen::Index size() const { return static_cast<Eigen::Index>(perm_.size()); }
  /// out = (L U)^{-1} applied in original column ordering, i.e. Q (LU)^{-1}.
  void apply(const Vector& rhs, Vector& out) const;

  /// Explicit factors (L without its unit diagonal stored, so it is added).
  SparseMatrix lower() const;
  SparseMatrix upper() const;
  const std::vector<Eigen::Index>& permutation() const { return perm_; }
  Eigen::Index fill() const;

 private:
  Eigen::Index n_ = 0;
  std::vector<Eigen::Index> l_ptr_, l_idx_, u_ptr_, u_idx_;
  std::vector<double> l_val_, u_val_, u_diag_inv_;
  std::vector<Eigen::Index> perm_;
};

struct SolveResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool restarted = false;
};

/// BiCGSTAB with a fixed ILUTP preconditioner, built once per matrix.
class PreconditionedSolver {
 public:
  PreconditionedSolver() = default;
  PreconditionedSolver(SparseMatrix a, const SolverConfig& cfg);

  SolveResult solve(const Vector& rhs, const Vector& x0) const;
  const SparseMatrix& matrix() const { return a_; }
  const Ilutp& preconditioner() const { return ilu_; }
  const SolverConfig& config() const { return cfg_; }

 private:
  SparseMatrix a_;
  Ilutp ilu_;
  SolverConfig cfg_;
};

SolveResult precond_solve(const SparseMatrix& mat, const Vector& rhs, const SolverConfig& cfg, const Vector& x0);

}  // namespace swingpide
