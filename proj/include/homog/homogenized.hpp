#pragma once

#include "homog/finescale.hpp"
#include "homog/scalar_cell.hpp"
#include "homog/stokes_cell.hpp"
#include "homog/tensors.hpp"

namespace homog {

struct HomogenizedSolution {
  Mesh mesh;                 // Dirichlet macro mesh, resolution independent of eps
  ScalarField phi0;
  std::optional<VectorField> u0;
  std::optional<ScalarField> pi0;
  EffectiveTensors tensors;
  int iterations = 0;
  int stokes_iterations = 0;
};

/// Constant-coefficient Dirichlet solve -Div(A grad phi0) = f, phi0 = k.
HomogenizedSolution solve_scalar_homogenized(const EffectiveTensors& tensors,
                                             const std::function<double(const Vec2&)>& f,
                                             const std::function<double(const Vec2&)>& k,
                                             int resolution, double tol = 1e-8,
                                             double max_iter_factor = 50.0);

/// Anisotropic Stokes solve with stress (2/Re) N : D(u0) - pi0 I plus the
/// data stress S B^{ij} d_i phi0 d_j phi0; fills u0, pi0 in `hom`.
/// Rejects N violating the Legendre-Hadamard condition.
void solve_stokes_homogenized(HomogenizedSolution& hom, const PhysicalParams& params,
                              double stab_beta = 0.05, double tol = 1e-8,
                              double max_iter_factor = 50.0);

/// Measured Legendre-Hadamard constant over `samples` deterministic unit
/// direction pairs.
double legendre_hadamard_beta(const Tensor4& N, int samples = 10000, unsigned seed = 12345);

/// Corrected-gradient evaluator grad phi0(x) + grad_y phi1(x, x/eps).
std::function<Vec2(const Vec2&)> build_corrector_phi1(const HomogenizedSolution& hom,
                                                      const ScalarCellSolution& cell_sol,
                                                      double epsilon);

/// Plain homogenized gradient evaluator (no corrector).
std::function<Vec2(const Vec2&)> homogenized_gradient(const HomogenizedSolution& hom);

/// Corrected-strain evaluator D(u0)(x) + D_y(u1)(x, x/eps); `chi_sign` is a
/// fault-injection hook used by the sensitivity tests (+1 nominal).
std::function<Mat2(const Vec2&)> build_corrector_u1(const HomogenizedSolution& hom,
                                                    const StokesCellSolution& stokes_sol,
                                                    double S, double epsilon,
                                                    double chi_sign = 1.0);

std::function<Mat2(const Vec2&)> homogenized_strain(const HomogenizedSolution& hom);

/// L2 norm over Omega of grad phi^eps - ref(x), with 4x subsampling per
/// fine element.
double corrector_error_scalar(const FineScaleSolution& fine,
                              const std::function<Vec2(const Vec2&)>& ref);

/// Same with the matrix Frobenius norm for strains; requires fine.u.
double corrector_error_stokes(const FineScaleSolution& fine,
                              const std::function<Mat2(const Vec2&)>& ref);

struct ConvergenceRow {
  double epsilon = 0.0;
  double err_grad_phi = 0.0;
  double err_grad_phi_nocorr = 0.0;
  double err_D_u = 0.0;
  double err_D_u_nocorr = 0.0;
  double sup_grad_phi = 0.0;
  double sup_grad_Phi1 = 0.0;
  double sup_grad_Phi2 = 0.0;
  double energy_residual = 0.0;
  double wall_time_s = 0.0;
};

}  // namespace homog
