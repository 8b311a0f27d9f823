#pragma once

#include <Eigen/Sparse>
#include <stdexcept>
#include <string>

namespace homog {

struct SolveError : std::runtime_error {
  double last_residual;
  SolveError(const std::string& msg, double res)
      : std::runtime_error(msg + " (last relative residual " + std::to_string(res) + ")"),
        last_residual(res) {}
};

struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct SparseOperator {
  SpMat K;
  bool symmetric = true;

  int dimension() const { return static_cast<int>(K.rows()); }

  // max |K - K^T| entry, for the symmetry invariant
  double asymmetry() const;
  // |K * 1|_inf, for the periodic-kernel invariant
  double constant_kernel_defect() const;
  double max_abs() const { return K.coeffs().size() ? K.coeffs().cwiseAbs().maxCoeff() : 0.0; }
};

enum class MeanConstraint { none, zero_mean };

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients. With zero_mean, rhs and
/// iterates are kept in the mean-zero subspace; the rhs must be compatible
/// (|mean| <= 1e-10 * ||rhs||).
CgResult solve_spd(const SparseOperator& op, const Eigen::VectorXd& rhs, double tol,
                   MeanConstraint constraint = MeanConstraint::none,
                   double max_iter_factor = 50.0);

}  // namespace homog
