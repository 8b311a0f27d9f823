#include "homog/saddle.hpp"

#include <Eigen/SparseLU>
#include <cmath>

namespace homog {

void SaddleOperator::project_kernel(Eigen::VectorXd& x) const {
  // pressure constant
  auto p = x.tail(np);
  p.array() -= p.mean();
  if (periodic) {
    // velocity translations
    double mx = 0.0, my = 0.0;
    const int nnode = nv / 2;
    for (int i = 0; i < nnode; ++i) {
      mx += x[2 * i];
      my += x[2 * i + 1];
    }
    mx /= nnode;
    my /= nnode;
    for (int i = 0; i < nnode; ++i) {
      x[2 * i] -= mx;
      x[2 * i + 1] -= my;
    }
  }
}

double SaddleOperator::composite_asymmetry() const {
  SparseOperator a{A}, c{C};
  return std::max(a.asymmetry(), c.asymmetry());
}

void SaddleOperator::prepare() {
  const int n = dimension();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(A.nonZeros() + 2 * B.nonZeros() + C.nonZeros());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int k = 0; k < B.outerSize(); ++k)
    for (SpMat::InnerIterator it(B, k); it; ++it) {
      trip.emplace_back(nv + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
      trip.emplace_back(static_cast<int>(it.col()), nv + static_cast<int>(it.row()), it.value());
    }
  for (int k = 0; k < C.outerSize(); ++k)
    for (SpMat::InnerIterator it(C, k); it; ++it)
      trip.emplace_back(nv + static_cast<int>(it.row()), nv + static_cast<int>(it.col()),
                        it.value());

  // Regularize toward strict quasi-definiteness so the signed Cholesky
  // factorization exists without pivoting: a tiny positive shift on the
  // velocity diagonal absorbs the periodic translation kernel, a tiny
  // negative one on the pressure diagonal the constant mode. Both live only
  // in the preconditioner; the defect correction removes their effect.
  double dv = 0.0, dp = 0.0;
  for (int i = 0; i < nv; ++i) dv = std::max(dv, std::abs(A.coeff(i, i)));
  for (int i = 0; i < np; ++i) dp = std::max(dp, std::abs(C.coeff(i, i)));
  if (dp == 0.0) dp = dv;
  for (int i = 0; i < nv; ++i) trip.emplace_back(i, i, 1e-10 * dv);
  for (int i = 0; i < np; ++i) trip.emplace_back(nv + i, nv + i, -1e-8 * dp);

  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  {
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < K.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it)
        rowsum[it.row()] += std::abs(it.value());
    norm_inf = rowsum.maxCoeff();
  }

  auto fac = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
  fac->compute(K);
  if (fac->info() != Eigen::Success)
    throw SolveError("saddle preconditioner breakdown: factorization failed", 0.0);
  Kfac = std::move(fac);
}

SaddleResult solve_saddle(const SaddleOperator& op, const Eigen::VectorXd& rhs, double tol,
                          double max_iter_factor) {
  const int n = op.dimension();
  const long max_iter =
      std::max<long>(20, static_cast<long>(max_iter_factor));  // refinement passes

  Eigen::VectorXd b = rhs;
  const double bnorm_raw = b.norm();
  // compatibility: rhs must be orthogonal to the pressure-constant mode
  {
    const double pmean = b.tail(op.np).sum() / op.np;
    if (std::abs(pmean) * std::sqrt(static_cast<double>(op.np)) > 1e-10 * (bnorm_raw + 1e-300) &&
        std::abs(pmean) > 1e-13)
      throw SolveError("saddle rhs has a pressure-constant component", std::abs(pmean));
  }
  op.project_kernel(b);
  const double bnorm = b.norm();

  SaddleResult out;
  out.velocity = Eigen::VectorXd::Zero(op.nv);
  out.pressure = Eigen::VectorXd::Zero(op.np);
  if (bnorm == 0.0) return out;

  SaddleOperator local;  // holds a locally built factorization if needed
  const SaddleOperator* opp = &op;
  if (!op.Kfac) {
    local = op;
    local.prepare();
    opp = &local;
  }

  Eigen::VectorXd x = opp->Kfac->solve(b);
  op.project_kernel(x);
  double rel = std::numeric_limits<double>::infinity();
  long it = 1;
  Eigen::VectorXd r(n), dx(n);
  for (; it <= max_iter; ++it) {
    op.apply(x, r);
    r = b - r;
    op.project_kernel(r);
    // normwise backward error: the penalized entries (mu_pen) set the
    // attainable absolute residual, so plain ||r||/||b|| can sit above tol
    // in double precision even for the exact factorization
    rel = r.norm() / (bnorm + opp->norm_inf * x.norm());
    if (rel <= tol) break;
    dx = opp->Kfac->solve(r);
    op.project_kernel(dx);
    x += dx;
  }
  if (rel > tol) throw SolveError("saddle refinement cap exceeded", rel);

  out.velocity = x.head(op.nv);
  out.pressure = x.tail(op.np);
  out.iterations = static_cast<int>(it);
  out.relative_residual = rel;
  return out;
}

}  // namespace homog
