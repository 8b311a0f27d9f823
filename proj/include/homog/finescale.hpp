#pragma once

#include <optional>
#include <vector>

#include "homog/assemble.hpp"

namespace homog {

struct PhysicalParams {
  double Re = 1.0;
  double Fr = 1.0;
  double S = 1.0;
  Vec2 g_body{0.0, -1.0};
  std::function<double(const Vec2&)> f_source = [](const Vec2&) { return 1.0; };
  std::function<double(const Vec2&)> k_bc = [](const Vec2& x) { return x[0]; };

  void validate() const {
    if (!(Re > 0.0 && Fr > 0.0 && S >= 0.0))
      throw ConfigError("physics: Re, Fr must be positive and S nonnegative");
  }
};

struct ParticleDiagnostics {
  Vec2 force = Vec2::Zero();
  double torque = 0.0;
};

struct FineScaleSolution {
  double epsilon = 0.0;
  Mesh mesh;             // Dirichlet macro mesh
  ScalarField phi;
  double energy_residual = 0.0;   // discrete energy-identity defect (relative)
  int iterations = 0;

  std::optional<VectorField> u;
  std::optional<ScalarField> p;
  double rigidity_residual = 0.0;       // ||D(u)||_{L2(solid)}
  double rigidity_fraction = 0.0;       // relative to ||D(u)||_{L2(Omega)}
  std::vector<ParticleDiagnostics> particles;
  int stokes_iterations = 0;
};

/// Oscillatory-coefficient Dirichlet problem -Div[a(x/eps) grad phi] = f.
FineScaleSolution solve_scalar_finescale(const MacroGeometry& macro,
                                         const std::function<double(const Vec2&)>& f,
                                         const std::function<double(const Vec2&)>& g,
                                         double tol = 1e-8, double max_iter_factor = 50.0);

/// max over elements of |grad phi| (piecewise-constant gradients).
double gradient_sup(const FineScaleSolution& sol);

/// Boundary corrector problem: f = 0, g = x_i (i in {0,1}).
FineScaleSolution dirichlet_corrector(const MacroGeometry& macro, int i, double tol = 1e-8,
                                      double max_iter_factor = 50.0);

/// tau(phi) = S a(x/eps) (grad phi x grad phi - 1/2 |grad phi|^2 I), per element.
MatrixField maxwell_stress_field(const MacroGeometry& macro, const FineScaleSolution& sol,
                                 double S);

struct SuspensionOptions {
  double mu_pen = 1e6;
  double stab_beta = 0.05;
  double tol = 1e-8;
  double max_iter_factor = 50.0;
};

/// One-way coupled penalized suspension solve: fills u, p and the particle
/// balance diagnostics on the same macro mesh as `sol`.
void solve_suspension_finescale(const MacroGeometry& macro, const PhysicalParams& params,
                                FineScaleSolution& sol, const SuspensionOptions& opt = {});

}  // namespace homog
