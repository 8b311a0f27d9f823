#pragma once

#include <memory>

#include "homog/mesh.hpp"
#include "homog/sparse.hpp"

namespace homog {

/// Symmetric saddle system [[A, B^T], [B, C]] for stabilized P1-P1 Stokes.
/// A is SPD on the complement of rigid translations (periodic) or of the
/// eliminated boundary dofs (Dirichlet); C is symmetric negative semidefinite.
struct SaddleOperator {
  SpMat A;                  // 2N x 2N velocity block
  SpMat B;                  // Np x 2N  (-div coupling)
  SpMat C;                  // Np x Np  stabilization
  int nv = 0, np = 0;
  bool periodic = true;
  std::vector<char> fixed_vel;      // Dirichlet-eliminated velocity dofs
  Eigen::VectorXd precond_p;        // positive pressure preconditioner diagonal

  // Cached factorization of the composite matrix, used as the preconditioner
  // of the refinement iteration; built once by prepare() so concurrent solves
  // can share the operator.
  std::shared_ptr<const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> Kfac;
  double norm_inf = 0.0;  // composite infinity norm, for the backward error
  void prepare();

  int dimension() const { return nv + np; }

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    y.head(nv).noalias() = A * x.head(nv);
    y.head(nv).noalias() += B.transpose() * x.tail(np);
    y.tail(np).noalias() = B * x.head(nv);
    y.tail(np).noalias() += C * x.tail(np);
  }

  // Removes the null-space components: pressure constant, and (periodic)
  // velocity translations restricted to non-fixed dofs.
  void project_kernel(Eigen::VectorXd& x) const;

  double composite_asymmetry() const;
};

struct SaddleResult {
  Eigen::VectorXd velocity;  // interleaved, size nv
  Eigen::VectorXd pressure;  // size np, mean-zero
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Factorization-preconditioned defect-correction solve: the penalization
/// contrast (up to 1e12 in the composite matrix) stalls diagonally
/// preconditioned Krylov iterations far above the requested tolerances, so
/// the preconditioner is a sparse LU of the composite matrix and the outer
/// iteration is plain residual refinement with kernel projection. Throws
/// SolveError on a refinement cap or factorization breakdown.
SaddleResult solve_saddle(const SaddleOperator& op, const Eigen::VectorXd& rhs, double tol,
                          double max_iter_factor = 50.0);

}  // namespace homog
