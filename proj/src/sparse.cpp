#include "homog/sparse.hpp"

#include <cmath>

namespace homog {

double SparseOperator::asymmetry() const {
  SpMat d = K - SpMat(K.transpose());
  double m = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SpMat::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

double SparseOperator::constant_kernel_defect() const {
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(K.cols());
  return (K * ones).cwiseAbs().maxCoeff();
}

CgResult solve_spd(const SparseOperator& op, const Eigen::VectorXd& rhs, double tol,
                   MeanConstraint constraint, double max_iter_factor) {
  const int n = op.dimension();
  const long max_iter = std::max<long>(100, static_cast<long>(max_iter_factor * std::sqrt(n)));

  Eigen::VectorXd b = rhs;
  if (constraint == MeanConstraint::zero_mean) {
    const double m = b.mean();
    if (std::abs(m) > 1e-10 * (b.norm() / std::sqrt(static_cast<double>(n)) + 1e-300) &&
        std::abs(m) > 1e-14)
      throw SolveError("zero-mean constraint: incompatible rhs (nonzero mean)", std::abs(m));
    b.array() -= m;
  }

  const double bnorm = b.norm();
  CgResult out;
  out.x = Eigen::VectorXd::Zero(n);
  if (bnorm == 0.0) return out;

  Eigen::VectorXd diag(n);
  for (int i = 0; i < n; ++i) {
    const double d = op.K.coeff(i, i);
    diag[i] = (d > 0.0) ? 1.0 / d : 1.0;
  }

  auto project = [&](Eigen::VectorXd& v) {
    if (constraint == MeanConstraint::zero_mean) v.array() -= v.mean();
  };

  Eigen::VectorXd r = b, z = diag.asDiagonal() * r;
  project(z);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  Eigen::VectorXd Kp(n);
  for (long it = 0; it < max_iter; ++it) {
    Kp.noalias() = op.K * p;
    const double pKp = p.dot(Kp);
    if (pKp <= 0.0) throw SolveError("CG breakdown: operator not positive definite", r.norm() / bnorm);
    const double alpha = rz / pKp;
    out.x += alpha * p;
    r -= alpha * Kp;
    out.iterations = static_cast<int>(it + 1);
    if (r.norm() <= tol * bnorm) {
      // recompute the true residual to guard against drift
      r = b - op.K * out.x;
      project(r);
      if (r.norm() <= tol * bnorm) break;
    }
    z = diag.asDiagonal() * r;
    project(z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  project(out.x);
  out.relative_residual = (b - op.K * out.x).norm() / bnorm;
  if (out.relative_residual > tol)
    throw SolveError("CG iteration cap exceeded", out.relative_residual);
  return out;
}

}  // namespace homog
