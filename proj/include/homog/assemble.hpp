#pragma once

#include <functional>
#include <optional>

#include "homog/mesh.hpp"
#include "homog/saddle.hpp"
#include "homog/sparse.hpp"

namespace homog {

// Per-element samplers; elements are visited with their centroid.
using MatrixSampler = std::function<Mat2(int e, const Vec2& centroid)>;
using ScalarSampler = std::function<double(int e, const Vec2& centroid)>;
using VectorSampler = std::function<Vec2(int e, const Vec2& centroid)>;

/// P1 stiffness matrix K_ab = sum_e a_e grad(N_a) . grad(N_b) |e|.
/// Rejects non-elliptic element coefficients.
SparseOperator assemble_scalar(const Mesh& mesh, const MatrixSampler& coeff);

/// Load from a scalar source: b_a = sum_e f(c_e) |e| / 3.
Eigen::VectorXd scalar_load_source(const Mesh& mesh, const ScalarSampler& f);

/// Load from an element flux g_e: b_a = sum_e g_e . grad(N_a) |e|.
/// The periodic cell problems use g_e = -a_e e^i.
Eigen::VectorXd scalar_load_flux(const Mesh& mesh, const VectorSampler& g);

/// Energy of a nodal field in the assembled form: v^T K v.
double energy(const SparseOperator& K, const Eigen::VectorXd& v);

/// Symmetric strong imposition of Dirichlet data on a scalar system:
/// boundary rows/cols replaced by identity, interior rhs corrected.
struct DirichletScalarSystem {
  SparseOperator K;        // reduced SPD system
  Eigen::VectorXd rhs;
  Eigen::VectorXd boundary_values;  // full-size, zero at interior nodes
};
DirichletScalarSystem apply_scalar_dirichlet(const Mesh& mesh, const SparseOperator& K,
                                             const Eigen::VectorXd& load,
                                             const std::function<double(const Vec2&)>& g);

// --- Stokes -----------------------------------------------------------------

/// Linear stress law sigma = stress_of_strain(e, D); isotropic Stokes uses
/// D -> 2 mu_e D, the homogenized solve a constant fourth-rank contraction.
using StressLaw = std::function<Mat2(int e, const Mat2& strain)>;

struct StokesSystem {
  SaddleOperator op;
  Eigen::VectorXd rhs;  // size 2N + Np
  const Mesh* mesh = nullptr;
};

struct StokesLoads {
  std::optional<VectorSampler> body_force;            // + int f . w
  std::optional<std::function<Mat2(int, const Vec2&)>> extra_stress;  // - int tau : D(w)
  std::function<Vec2(const Vec2&)> boundary_velocity; // Dirichlet data (default 0)
};

/// Equal-order P1-P1 assembly with Brezzi-Pitkaranta stabilization
/// C = -beta h^2 grad p . grad q. `mu_scale` feeds the pressure block of the
/// MINRES preconditioner (lumped mass / mu).
StokesSystem assemble_stokes(const Mesh& mesh, const StressLaw& stress, const ScalarSampler& mu_scale,
                             const StokesLoads& loads, double stab_beta);

/// Convenience isotropic assembly: viscous stress 2 mu(e) D. Rejects
/// non-positive viscosity.
StokesSystem assemble_stokes_isotropic(const Mesh& mesh, const ScalarSampler& mu,
                                       const StokesLoads& loads, double stab_beta);

/// Discrete divergence L2 norm of a velocity field.
double divergence_l2(const VectorField& u);

}  // namespace homog
