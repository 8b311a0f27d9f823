#pragma once

#include <array>

#include "homog/scalar_cell.hpp"

namespace homog {

/// P^{ij}_k = y_j delta_ik has the constant strain sym(e^i x e^j).
inline Mat2 p_strain(int i, int j) {
  Mat2 d = Mat2::Zero();
  d(i, j) = 1.0;
  return 0.5 * (d + d.transpose());
}

/// Trace-free part of D(P^{ij}). For i = j the constraints Div chi = 0 in Y
/// and D(P^{ii} - chi) = 0 in Y_s are jointly infeasible (tr D(P^{ii}) = 1,
/// and a periodic chi cannot have unit divergence), so the chi problems are
/// driven by the deviatoric strain; only trace-free macroscopic strains occur
/// since Div u0 = 0, and for those the two formulations agree.
inline Mat2 p_strain_dev(int i, int j) {
  Mat2 d = p_strain(i, j);
  return d - 0.5 * d.trace() * Mat2::Identity();
}

struct StokesCellProblem {
  VectorField velocity;   // zero-mean per component
  ScalarField pressure;   // mean-zero
  double rigidity_residual = 0.0;   // ||D(.)||_{L2(Y_s)} of the constrained field
  double divergence_norm = 0.0;     // ||Div v||_{L2(Y)}
  Vec2 interface_force = Vec2::Zero();   // net traction over Gamma (diagnostic)
  double interface_torque = 0.0;
  int iterations = 0;
};

struct StokesCellSolution {
  Mesh mesh;
  double mu_pen = 1e6;
  std::array<std::array<StokesCellProblem, 2>, 2> chi;  // chi[i][j]
  std::array<std::array<StokesCellProblem, 2>, 2> xi;
  std::array<std::array<MatrixField, 2>, 2> tau_ref;
};

struct StokesCellOptions {
  double mu_pen = 1e6;
  double stab_beta = 0.05;
  double tol = 1e-10;
  double max_iter_factor = 50.0;
};

/// Penalized periodic Stokes solve for chi^{ij}: rigid inclusion imposed by
/// viscosity mu_pen in Y_s, data stress 2 mu(y) D(P^{ij}) on the rhs.
StokesCellProblem solve_chi(const CellGeometry& cell, int i, int j,
                            const StokesCellOptions& opt = {});

/// Penalized periodic Stokes solve for xi^{ij} with load -int tau_ref : D(w).
StokesCellProblem solve_xi(const CellGeometry& cell, const MatrixField& tau_ref_ij, int i, int j,
                           const StokesCellOptions& opt = {});

/// All d^2 chi and xi problems plus tau_ref fields; the scalar correctors are
/// solved internally on the same mesh.
StokesCellSolution solve_stokes_cell(const CellGeometry& cell, const ScalarCellSolution& scalar_sol,
                                     const StokesCellOptions& opt = {}, int workers = 1);

/// N^{ij}_{mn} = mean of D(P^{ij}-chi^{ij}) : D(P^{mn}-chi^{mn}).
Tensor4 effective_viscosity(const CellGeometry& cell, const StokesCellSolution& sol);

/// B^{ij} = mean of (D(xi^{ij}) + tau_ref^{ij}).
std::array<std::array<Mat2, 2>, 2> effective_coupling(const CellGeometry& cell,
                                                      const StokesCellSolution& sol);

}  // namespace homog
