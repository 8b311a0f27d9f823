#include "homog/scalar_cell.hpp"

namespace homog {

MatrixSampler cell_coefficient_sampler(const CellGeometry& cell) {
  return [cell](int, const Vec2& c) { return cell.coefficient_at(c); };
}

ScalarSampler cell_viscosity_sampler(const CellGeometry& cell, double mu_pen) {
  return [cell, mu_pen](int, const Vec2& c) { return cell.in_solid(c) ? mu_pen : 1.0; };
}

ScalarCellSolution solve_correctors(const CellGeometry& cell, double tol, double max_iter_factor) {
  const Mesh mesh = make_mesh(cell.resolution, BoundaryMode::periodic);
  SparseOperator K = assemble_scalar(mesh, cell_coefficient_sampler(cell));

  ScalarCellSolution sol;
  sol.mesh = mesh;
  for (int i = 0; i < 2; ++i) {
    Vec2 ei = Vec2::Zero();
    ei[i] = 1.0;
    Eigen::VectorXd b = scalar_load_flux(
        mesh, [&](int, const Vec2& c) { return Vec2(-cell.coefficient_at(c) * ei); });
    CgResult r;
    try {
      r = solve_spd(K, b, tol, MeanConstraint::zero_mean, max_iter_factor);
    } catch (const SolveError& e) {
      throw SolveError("cell corrector omega^" + std::to_string(i + 1) + ": " + e.what(),
                       e.last_residual);
    }
    sol.omega[i].mesh = mesh;
    sol.omega[i].nodal = std::move(r.x);
    // zero-mean representative of H^1_per/R (projected against the P1 mean)
    sol.omega[i].nodal.array() -= mean(sol.omega[i]);
    sol.sup_omega[i] = sup_norm(sol.omega[i]);
    sol.sup_grad_omega[i] = sup_grad(sol.omega[i]);
  }
  return sol;
}

Mat2 effective_permeability(const CellGeometry& cell, const ScalarCellSolution& sol) {
  const Mesh& mesh = sol.mesh;
  const double area = mesh.elem_area();
  Mat2 A = Mat2::Zero();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mat2 a = cell.coefficient_at(mesh.element(e).centroid);
    const Vec2 g0 = sol.corrected_gradient(0, e), g1 = sol.corrected_gradient(1, e);
    const Vec2 g[2] = {g0, g1};
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) A(j, k) += area * (a * g[k]).dot(g[j]);
  }
  return A;
}

Mat2 effective_permeability_flux_form(const CellGeometry& cell, const ScalarCellSolution& sol) {
  const Mesh& mesh = sol.mesh;
  const double area = mesh.elem_area();
  Mat2 A = Mat2::Zero();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mat2 a = cell.coefficient_at(mesh.element(e).centroid);
    for (int k = 0; k < 2; ++k) {
      const Vec2 flux = a * sol.corrected_gradient(k, e);
      for (int j = 0; j < 2; ++j) A(j, k) += area * flux[j];
    }
  }
  return A;
}

MatrixField maxwell_cell_stress(const CellGeometry& cell, const ScalarCellSolution& sol, int i,
                                int j) {
  const Mesh& mesh = sol.mesh;
  MatrixField tau;
  tau.mesh = mesh;
  tau.elem.resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mat2 a = cell.coefficient_at(mesh.element(e).centroid);
    const Vec2 gi = sol.corrected_gradient(i, e), gj = sol.corrected_gradient(j, e);
    tau.elem[e] = a * (gi * gj.transpose() - 0.5 * gi.dot(gj) * Mat2::Identity());
  }
  return tau;
}

}  // namespace homog
