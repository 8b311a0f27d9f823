#include "homog/finescale.hpp"

namespace homog {

namespace {

MatrixSampler macro_coefficient_sampler(const MacroGeometry& macro) {
  return [&macro](int, const Vec2& c) { return macro.coefficient_at(c); };
}

}  // namespace

FineScaleSolution solve_scalar_finescale(const MacroGeometry& macro,
                                         const std::function<double(const Vec2&)>& f,
                                         const std::function<double(const Vec2&)>& g, double tol,
                                         double max_iter_factor) {
  const Mesh mesh = make_mesh(macro.nodes_per_side(), BoundaryMode::dirichlet);
  SparseOperator K = assemble_scalar(mesh, macro_coefficient_sampler(macro));
  Eigen::VectorXd load = scalar_load_source(mesh, [&](int, const Vec2& c) { return f(c); });
  DirichletScalarSystem sys = apply_scalar_dirichlet(mesh, K, load, g);
  CgResult r = solve_spd(sys.K, sys.rhs, tol, MeanConstraint::none, max_iter_factor);

  FineScaleSolution sol;
  sol.epsilon = macro.epsilon();
  sol.mesh = mesh;
  sol.phi.mesh = mesh;
  sol.phi.nodal = std::move(r.x);
  sol.iterations = r.iterations;
  // enforce the boundary data bitwise
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (mesh.is_boundary_node(i)) sol.phi.nodal[i] = sys.boundary_values[i];

  // discrete energy identity: phi^T K phi = int f phi + boundary flux term
  {
    const Eigen::VectorXd Kphi = K.K * sol.phi.nodal;
    const double en = sol.phi.nodal.dot(Kphi);
    double work = load.dot(sol.phi.nodal);
    for (int i = 0; i < mesh.num_nodes(); ++i)
      if (mesh.is_boundary_node(i)) work += sol.phi.nodal[i] * (Kphi[i] - load[i]);
    sol.energy_residual = std::abs(en - work) / (std::abs(en) + 1e-300);
  }
  return sol;
}

double gradient_sup(const FineScaleSolution& sol) { return sup_grad(sol.phi); }

FineScaleSolution dirichlet_corrector(const MacroGeometry& macro, int i, double tol,
                                      double max_iter_factor) {
  return solve_scalar_finescale(
      macro, [](const Vec2&) { return 0.0; }, [i](const Vec2& x) { return x[i]; }, tol,
      max_iter_factor);
}

MatrixField maxwell_stress_field(const MacroGeometry& macro, const FineScaleSolution& sol,
                                 double S) {
  const Mesh& mesh = sol.mesh;
  MatrixField tau;
  tau.mesh = mesh;
  tau.elem.resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Vec2 g = sol.phi.gradient(e);
    const Mat2 a = macro.coefficient_at(mesh.element(e).centroid);
    tau.elem[e] = S * a * (g * g.transpose() - 0.5 * g.squaredNorm() * Mat2::Identity());
  }
  return tau;
}

void solve_suspension_finescale(const MacroGeometry& macro, const PhysicalParams& params,
                                FineScaleSolution& sol, const SuspensionOptions& opt) {
  params.validate();
  const Mesh& mesh = sol.mesh;
  if (mesh.n != macro.nodes_per_side())
    throw ConfigError("suspension solve: scalar solution lives on a different macro mesh");

  MatrixField tau = maxwell_stress_field(macro, sol, params.S);
  std::vector<double> mu(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e)
    mu[e] = macro.in_solid(mesh.element(e).centroid) ? opt.mu_pen : 1.0 / params.Re;

  StokesLoads loads;
  const double fr2 = params.Fr * params.Fr;
  const Vec2 gb = params.g_body;
  loads.body_force = [&gb, fr2](int, const Vec2&) { return Vec2(gb / fr2); };
  loads.extra_stress = [&tau](int e, const Vec2&) { return tau.elem[e]; };
  StokesSystem sys = assemble_stokes(
      mesh, [&mu](int e, const Mat2& d) { return Mat2(2.0 * mu[e] * d); },
      [&mu](int e, const Vec2&) { return mu[e]; }, loads, opt.stab_beta);
  SaddleResult r = solve_saddle(sys.op, sys.rhs, opt.tol, opt.max_iter_factor);

  sol.u = VectorField{mesh, std::move(r.velocity)};
  sol.p = ScalarField{mesh, std::move(r.pressure)};
  sol.stokes_iterations = r.iterations;

  // rigidity residual over the particle phase
  double s_solid = 0.0, s_all = 0.0;
  const double area = mesh.elem_area();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double d2 = sol.u->strain(e).squaredNorm();
    s_all += area * d2;
    if (macro.in_solid(mesh.element(e).centroid)) s_solid += area * d2;
  }
  sol.rigidity_residual = std::sqrt(s_solid);
  sol.rigidity_fraction = s_all > 0.0 ? std::sqrt(s_solid / s_all) : 0.0;

  // per-particle balance integrals over the polygonal interface (disk only)
  sol.particles.clear();
  const InclusionSpec& inc = macro.cell.inclusion;
  if (inc.kind == InclusionKind::disk || inc.kind == InclusionKind::ellipse) {
    const double eps = macro.epsilon();
    const int M = std::max(32, 4 * macro.resolution_per_cell);
    for (int cy = 0; cy < macro.m; ++cy)
      for (int cx = 0; cx < macro.m; ++cx) {
        ParticleDiagnostics pd;
        const Vec2 corner(cx * eps, cy * eps);
        for (int k = 0; k < M; ++k) {
          const double t0 = 2.0 * M_PI * k / M, t1 = 2.0 * M_PI * (k + 1) / M;
          const double tm = 0.5 * (t0 + t1);
          Vec2 rad0, rad1, radm, nrm;
          if (inc.kind == InclusionKind::disk) {
            rad0 = inc.radius * Vec2(std::cos(t0), std::sin(t0));
            rad1 = inc.radius * Vec2(std::cos(t1), std::sin(t1));
            radm = inc.radius * Vec2(std::cos(tm), std::sin(tm));
            nrm = radm.normalized();
          } else {
            rad0 = Vec2(inc.semi_axes[0] * std::cos(t0), inc.semi_axes[1] * std::sin(t0));
            rad1 = Vec2(inc.semi_axes[0] * std::cos(t1), inc.semi_axes[1] * std::sin(t1));
            radm = Vec2(inc.semi_axes[0] * std::cos(tm), inc.semi_axes[1] * std::sin(tm));
            nrm = Vec2(std::cos(tm) / inc.semi_axes[0], std::sin(tm) / inc.semi_axes[1])
                      .normalized();
          }
          const Vec2 pm = corner + eps * (inc.center + radm);
          const double dl = eps * (rad1 - rad0).norm();
          const Vec2 sample = pm + 0.75 * mesh.h * nrm;
          if (sample[0] <= 0.0 || sample[0] >= 1.0 || sample[1] <= 0.0 || sample[1] >= 1.0)
            continue;
          const int e = mesh.locate(sample);
          const Mat2 sigma = 2.0 * (1.0 / params.Re) * sol.u->strain(e) -
                             sol.p->value_at(sample) * Mat2::Identity() + tau.elem[e];
          const Vec2 traction = sigma * nrm;
          pd.force += dl * traction;
          pd.torque += dl * (traction[0] * nrm[1] - traction[1] * nrm[0]);
        }
        sol.particles.push_back(pd);
      }
  }
}

}  // namespace homog
