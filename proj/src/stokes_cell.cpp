#include "homog/stokes_cell.hpp"

#include <future>

namespace homog {

namespace {

// Velocity-part load -int tau : D(w); pressure part zero (periodic cell).
Eigen::VectorXd extra_stress_rhs(const Mesh& mesh,
                                 const std::function<Mat2(int, const Vec2&)>& tau) {
  const int nn = mesh.num_nodes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3 * nn);
  const double area = mesh.elem_area();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mesh::Element el = mesh.element(e);
    const Mat2 t = tau(e, el.centroid);
    const Mat2 ts = 0.5 * (t + t.transpose());
    for (int a = 0; a < 3; ++a) {
      const Vec2 g = el.grad[a];
      // tau : sym(e_k x grad N_a) for k = 0,1
      rhs[2 * el.node[a]] -= area * (ts.row(0).transpose().dot(g));
      rhs[2 * el.node[a] + 1] -= area * (ts.row(1).transpose().dot(g));
    }
  }
  return rhs;
}

double l2_on_solid(const CellGeometry& cell, const Mesh& mesh,
                   const std::function<Mat2(int)>& strain) {
  double s = 0.0;
  const double area = mesh.elem_area();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (!cell.in_solid(mesh.element(e).centroid)) continue;
    s += area * strain(e).squaredNorm();
  }
  return std::sqrt(s);
}

// Net traction force and torque over the polygonal interface, sampling the
// stress a little outside Gamma. Disk and ellipse only; other shapes skip.
void interface_balance(const CellGeometry& cell, const Mesh& mesh,
                       const std::function<Mat2(const Vec2&)>& stress, Vec2& force,
                       double& torque) {
  force = Vec2::Zero();
  torque = 0.0;
  const InclusionSpec& inc = cell.inclusion;
  if (inc.kind != InclusionKind::disk && inc.kind != InclusionKind::ellipse) return;
  const int M = std::max(64, 4 * mesh.n);
  // sample outside the O(h) staircase band around the polygonal interface,
  // where the discrete stress carries O(1) local noise
  const double offset = 4.0 * mesh.h;
  for (int k = 0; k < M; ++k) {
    const double t0 = 2.0 * M_PI * k / M, t1 = 2.0 * M_PI * (k + 1) / M;
    const double tm = 0.5 * (t0 + t1);
    Vec2 p0, p1, pm, nrm;
    if (inc.kind == InclusionKind::disk) {
      const double r = inc.radius;
      p0 = inc.center + r * Vec2(std::cos(t0), std::sin(t0));
      p1 = inc.center + r * Vec2(std::cos(t1), std::sin(t1));
      pm = inc.center + r * Vec2(std::cos(tm), std::sin(tm));
      nrm = Vec2(std::cos(tm), std::sin(tm));
    } else {
      const double ax = inc.semi_axes[0], ay = inc.semi_axes[1];
      p0 = inc.center + Vec2(ax * std::cos(t0), ay * std::sin(t0));
      p1 = inc.center + Vec2(ax * std::cos(t1), ay * std::sin(t1));
      pm = inc.center + Vec2(ax * std::cos(tm), ay * std::sin(tm));
      nrm = Vec2(std::cos(tm) / ax, std::sin(tm) / ay).normalized();
    }
    const double dl = (p1 - p0).norm();
    const Vec2 sample = pm + offset * nrm;
    const Vec2 traction = stress(sample) * nrm;
    const Vec2 lever = pm - inc.center;
    force += dl * traction;
    torque += dl * (lever[0] * traction[1] - lever[1] * traction[0]);
  }
}

struct CellStokesContext {
  Mesh mesh;
  StokesSystem sys;
  std::vector<double> nu;  // 1/2 in Y_f, mu_pen in Y_s
};

// The cell problems are posed with fluid viscosity 1/2 so that the fluid
// momentum balance reads Div[D(.) + (.)I + ...] = 0 without a factor 2.
CellStokesContext build_cell_stokes(const CellGeometry& cell, const StokesCellOptions& opt) {
  CellStokesContext ctx;
  ctx.mesh = make_mesh(cell.resolution, BoundaryMode::periodic);
  ctx.nu.resize(ctx.mesh.num_elements());
  for (int e = 0; e < ctx.mesh.num_elements(); ++e)
    ctx.nu[e] = cell.in_solid(ctx.mesh.element(e).centroid) ? opt.mu_pen : 0.5;
  const std::vector<double>& nu = ctx.nu;
  ctx.sys = assemble_stokes(
      ctx.mesh, [&nu](int e, const Mat2& d) { return Mat2(2.0 * nu[e] * d); },
      [&nu](int e, const Vec2&) { return nu[e]; }, StokesLoads{}, opt.stab_beta);
  return ctx;
}

StokesCellProblem solve_cell_problem(const CellGeometry& cell, const CellStokesContext& ctx,
                                     const Eigen::VectorXd& rhs, const StokesCellOptions& opt,
                                     bool chi_mode, int i, int j) {
  SaddleResult r = solve_saddle(ctx.sys.op, rhs, opt.tol, opt.max_iter_factor);
  StokesCellProblem out;
  out.velocity.mesh = ctx.mesh;
  out.velocity.nodal = std::move(r.velocity);
  out.pressure.mesh = ctx.mesh;
  out.pressure.nodal = std::move(r.pressure);
  out.iterations = r.iterations;
  out.divergence_norm = divergence_l2(out.velocity);
  const Mat2 Pij = p_strain_dev(i, j);
  if (chi_mode) {
    out.rigidity_residual = l2_on_solid(
        cell, ctx.mesh, [&](int e) { return Mat2(Pij - out.velocity.strain(e)); });
  } else {
    out.rigidity_residual =
        l2_on_solid(cell, ctx.mesh, [&](int e) { return out.velocity.strain(e); });
  }
  return out;
}

}  // namespace

StokesCellProblem solve_chi(const CellGeometry& cell, int i, int j, const StokesCellOptions& opt) {
  CellStokesContext ctx = build_cell_stokes(cell, opt);
  const Mat2 Pij = p_strain_dev(i, j);
  const std::vector<double>& nu = ctx.nu;
  Eigen::VectorXd rhs = extra_stress_rhs(
      ctx.mesh, [&](int e, const Vec2&) { return Mat2(-2.0 * nu[e] * Pij); });
  StokesCellProblem out = solve_cell_problem(cell, ctx, rhs, opt, true, i, j);
  // balance diagnostic: traction [D(P - chi) + q I] n on the fluid side
  interface_balance(
      cell, ctx.mesh,
      [&](const Vec2& x) {
        const int e = ctx.mesh.locate(x);
        const double q = out.pressure.value_at(x);
        return Mat2(Pij - out.velocity.strain(e) + q * Mat2::Identity());
      },
      out.interface_force, out.interface_torque);
  return out;
}

StokesCellProblem solve_xi(const CellGeometry& cell, const MatrixField& tau_ref_ij, int i, int j,
                           const StokesCellOptions& opt) {
  CellStokesContext ctx = build_cell_stokes(cell, opt);
  Eigen::VectorXd rhs =
      extra_stress_rhs(ctx.mesh, [&](int e, const Vec2&) { return tau_ref_ij.elem[e]; });
  StokesCellProblem out = solve_cell_problem(cell, ctx, rhs, opt, false, i, j);
  interface_balance(
      cell, ctx.mesh,
      [&](const Vec2& x) {
        const int e = ctx.mesh.locate(x);
        const double r = -out.pressure.value_at(x);
        return Mat2(out.velocity.strain(e) + r * Mat2::Identity() + tau_ref_ij.elem[e]);
      },
      out.interface_force, out.interface_torque);
  return out;
}

StokesCellSolution solve_stokes_cell(const CellGeometry& cell, const ScalarCellSolution& scalar_sol,
                                     const StokesCellOptions& opt, int workers) {
  CellStokesContext ctx = build_cell_stokes(cell, opt);
  StokesCellSolution sol;
  sol.mesh = ctx.mesh;
  sol.mu_pen = opt.mu_pen;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) sol.tau_ref[i][j] = maxwell_cell_stress(cell, scalar_sol, i, j);

  auto run_one = [&](int idx) {
    const int i = idx / 2 % 2, j = idx % 2;
    const bool chi_mode = idx < 4;
    Eigen::VectorXd rhs;
    if (chi_mode) {
      const Mat2 Pij = p_strain_dev(i, j);
      rhs = extra_stress_rhs(ctx.mesh,
                             [&](int e, const Vec2&) { return Mat2(-2.0 * ctx.nu[e] * Pij); });
    } else {
      rhs = extra_stress_rhs(ctx.mesh,
                             [&](int e, const Vec2&) { return sol.tau_ref[i][j].elem[e]; });
    }
    StokesCellProblem p = solve_cell_problem(cell, ctx, rhs, opt, chi_mode, i, j);
    Vec2 force;
    double torque;
    if (chi_mode) {
      const Mat2 Pij = p_strain_dev(i, j);
      interface_balance(
          cell, ctx.mesh,
          [&](const Vec2& x) {
            const int e = ctx.mesh.locate(x);
            return Mat2(Pij - p.velocity.strain(e) + p.pressure.value_at(x) * Mat2::Identity());
          },
          force, torque);
    } else {
      interface_balance(
          cell, ctx.mesh,
          [&](const Vec2& x) {
            const int e = ctx.mesh.locate(x);
            return Mat2(p.velocity.strain(e) - p.pressure.value_at(x) * Mat2::Identity() +
                        sol.tau_ref[i][j].elem[e]);
          },
          force, torque);
    }
    p.interface_force = force;
    p.interface_torque = torque;
    return p;
  };

  std::vector<StokesCellProblem> results(8);
  if (workers <= 1) {
    for (int idx = 0; idx < 8; ++idx) results[idx] = run_one(idx);
  } else {
    std::vector<std::future<StokesCellProblem>> fut;
    for (int idx = 0; idx < 8; ++idx)
      fut.push_back(std::async(std::launch::async, run_one, idx));
    for (int idx = 0; idx < 8; ++idx) results[idx] = fut[idx].get();
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      sol.chi[i][j] = std::move(results[2 * i + j]);
      sol.xi[i][j] = std::move(results[4 + 2 * i + j]);
    }
  return sol;
}

Tensor4 effective_viscosity(const CellGeometry& cell, const StokesCellSolution& sol) {
  (void)cell;
  const Mesh& mesh = sol.mesh;
  const double area = mesh.elem_area();
  Tensor4 N{};
  // cache strains per element
  const int ne = mesh.num_elements();
  std::vector<std::array<Mat2, 4>> E(ne);
  for (int e = 0; e < ne; ++e)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        E[e][2 * i + j] = p_strain(i, j) - sol.chi[i][j].velocity.strain(e);
  for (int e = 0; e < ne; ++e)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double v = area * (E[e][a].array() * E[e][b].array()).sum();
        N(a / 2, a % 2, b / 2, b % 2) += v;
      }
  return N;
}

std::array<std::array<Mat2, 2>, 2> effective_coupling(const CellGeometry& cell,
                                                      const StokesCellSolution& sol) {
  (void)cell;
  const Mesh& mesh = sol.mesh;
  const double area = mesh.elem_area();
  std::array<std::array<Mat2, 2>, 2> B{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Mat2 acc = Mat2::Zero();
      for (int e = 0; e < mesh.num_elements(); ++e)
        acc += area * (sol.xi[i][j].velocity.strain(e) + sol.tau_ref[i][j].elem[e]);
      B[i][j] = acc;
    }
  return B;
}

}  // namespace homog
