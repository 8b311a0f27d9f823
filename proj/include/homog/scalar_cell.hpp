#pragma once

#include <array>

#include "homog/assemble.hpp"
#include "homog/tensors.hpp"

namespace homog {

struct ScalarCellSolution {
  Mesh mesh;                              // periodic cell mesh
  std::array<ScalarField, 2> omega;       // zero-mean correctors
  std::array<double, 2> sup_omega{};      // recorded boundedness diagnostics
  std::array<double, 2> sup_grad_omega{};

  // e^i + grad omega^i on element e
  Vec2 corrected_gradient(int i, int e) const {
    Vec2 g = omega[i].gradient(e);
    g[i] += 1.0;
    return g;
  }
};

/// Solves the d periodic cell problems for omega^i with load
/// -int a e^i . grad(test); zero-mean representatives.
ScalarCellSolution solve_correctors(const CellGeometry& cell, double tol = 1e-10,
                                    double max_iter_factor = 50.0);

/// A_jk = mean over Y of a (e^k + grad omega^k) . (e^j + grad omega^j).
Mat2 effective_permeability(const CellGeometry& cell, const ScalarCellSolution& sol);

/// The integration-by-parts form A_jk = mean of a (e^k + grad omega^k) . e^j,
/// used as a consistency check of the periodic assembly.
Mat2 effective_permeability_flux_form(const CellGeometry& cell, const ScalarCellSolution& sol);

/// tau_ref^{ij} = a [ (e^i+grad w^i) x (e^j+grad w^j)
///                    - 1/2 ((e^i+grad w^i).(e^j+grad w^j)) I ], per element.
MatrixField maxwell_cell_stress(const CellGeometry& cell, const ScalarCellSolution& sol, int i,
                                int j);

/// Element coefficient sampler for the cell at its stored resolution.
MatrixSampler cell_coefficient_sampler(const CellGeometry& cell);

/// Element viscosity sampler: 1 in Y_f, mu_pen in Y_s.
ScalarSampler cell_viscosity_sampler(const CellGeometry& cell, double mu_pen);

}  // namespace homog
