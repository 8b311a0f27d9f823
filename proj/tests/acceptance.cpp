// Acceptance suite: eight criteria, one pass/fail line each.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "homog/harness.hpp"

using namespace homog;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int num, const std::string& name, bool pass, const std::string& detail) {
  std::printf("criterion %d (%s): %s — %s\n", num, name.c_str(), pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0, num = 0.0, den = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= x.size();
  my /= x.size();
  for (size_t k = 0; k < x.size(); ++k) {
    num += (std::log(x[k]) - mx) * (std::log(y[k]) - my);
    den += (std::log(x[k]) - mx) * (std::log(x[k]) - mx);
  }
  return num / den;
}

ExperimentConfig default_config(const std::string& out_dir) {
  ExperimentConfig c;  // disk r=0.25 is the default inclusion
  c.coeff.a_in = 5.0 * Mat2::Identity();
  c.out_dir = out_dir;
  return c;
}

// --- criterion 1 ------------------------------------------------------------

void criterion_collapse() {
  const double cval = 2.0;
  InclusionSpec inc;
  inc.kind = InclusionKind::none;
  CoefficientField cf;
  cf.a_in = cval * Mat2::Identity();
  cf.a_out = cval * Mat2::Identity();
  const CellGeometry cell = build_unit_cell(inc, cf, 32);
  const ScalarCellSolution csol = solve_correctors(cell);
  const StokesCellSolution ssol = solve_stokes_cell(cell, csol);

  double worst = (effective_permeability(cell, csol) - cval * Mat2::Identity())
                     .cwiseAbs()
                     .maxCoeff();
  for (int i = 0; i < 2; ++i) worst = std::max(worst, sup_norm(csol.omega[i]));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      worst = std::max(worst, ssol.chi[i][j].velocity.nodal.cwiseAbs().maxCoeff());
      worst = std::max(worst, ssol.xi[i][j].velocity.nodal.cwiseAbs().maxCoeff());
    }
  const Tensor4 N = effective_viscosity(cell, ssol);
  const Tensor4 S = Tensor4::symmetrizer();
  for (int k = 0; k < 16; ++k) worst = std::max(worst, std::abs(N.v[k] - S.v[k]));
  const auto B = effective_coupling(cell, ssol);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Mat2 expect = Mat2::Zero();
      expect(i, j) += cval;
      if (i == j) expect -= 0.5 * cval * Mat2::Identity();
      worst = std::max(worst, (B[i][j] - expect).cwiseAbs().maxCoeff());
    }

  // fine-scale equals homogenized for every swept epsilon (same fine mesh)
  EffectiveTensors t;
  t.A = cval * Mat2::Identity();
  double worst_fh = 0.0;
  for (int m : {4, 8, 16, 32}) {
    const MacroGeometry macro = build_macro_domain(cell, m, 16);
    const FineScaleSolution fine = solve_scalar_finescale(
        macro, [](const Vec2&) { return 1.0; }, [](const Vec2& x) { return x[0]; }, 1e-10);
    const HomogenizedSolution hom = solve_scalar_homogenized(
        t, [](const Vec2&) { return 1.0; }, [](const Vec2& x) { return x[0]; }, 16 * m, 1e-10);
    worst_fh = std::max(worst_fh, (fine.phi.nodal - hom.phi0.nodal).cwiseAbs().maxCoeff());
  }

  const bool pass = worst <= 1e-8 && worst_fh <= 1e-6;
  report(1, "constant-coefficient collapse", pass,
         fmt("tensor/corrector defect %.2e (tol 1e-8), fine-vs-homogenized %.2e (tol 1e-6)",
             worst, worst_fh));
}

// --- criterion 2 ------------------------------------------------------------

void criterion_laminate() {
  InclusionSpec inc;
  inc.kind = InclusionKind::laminate;
  CoefficientField cf;
  cf.a_in = 1.0 * Mat2::Identity();
  cf.a_out = 4.0 * Mat2::Identity();
  const CellGeometry cell = build_unit_cell(inc, cf, 128);
  const ScalarCellSolution sol = solve_correctors(cell);
  const Mat2 A = effective_permeability(cell, sol);
  const double e11 = std::abs(A(0, 0) - 1.6) / 1.6;
  const double e22 = std::abs(A(1, 1) - 2.5) / 2.5;
  const bool pass = e11 <= 0.01 && e22 <= 0.01;
  report(2, "laminate oracle", pass,
         fmt("A = diag(%.6f, %.6f) vs diag(1.6, 2.5), rel err max %.2e (tol 1e-2)", A(0, 0),
             A(1, 1), std::max(e11, e22)));
}

// --- criteria 3-6, 8 share the default disk pipeline ------------------------

void criterion_tensor_structure(const CellPipelineResult& pipe) {
  const Mat2& A = pipe.tensors.A;
  double worst_sym = (A - A.transpose()).cwiseAbs().maxCoeff();
  const Eigen::SelfAdjointEigenSolver<Mat2> es(A);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  const bool eig_ok = lo >= 1.0 - 1e-8 && hi <= 5.0 + 1e-8;
  const double nsym = pipe.tensors.N.symmetry_defect();
  const double lh = legendre_hadamard_beta(pipe.tensors.N, 10000);
  double bsym = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      bsym = std::max(
          bsym, (pipe.tensors.B[i][j] - pipe.tensors.B[j][i].transpose()).cwiseAbs().maxCoeff());
  const bool pass = worst_sym <= 1e-10 && eig_ok && nsym <= 1e-8 && lh > 0.01 && bsym <= 1e-6;
  report(3, "effective-tensor structure", pass,
         fmt("A eigs [%.4f, %.4f] in [1,5], N symmetry %.2e, ", lo, hi, nsym) +
             fmt("LH beta %.4f over 1e4 samples, B transpose-pair defect %.2e", lh, bsym));
}

void criterion_penalization(const ExperimentConfig& config) {
  const CellGeometry cell = build_unit_cell(config.inclusion, config.coeff, 64);
  std::vector<double> inv_mu, rig;
  double iforce = 0.0, itorque = 0.0;
  for (double mu : {1e4, 1e5, 1e6}) {
    StokesCellOptions opt;
    opt.mu_pen = mu;
    const StokesCellProblem p = solve_chi(cell, 0, 0, opt);
    inv_mu.push_back(1.0 / mu);
    rig.push_back(p.rigidity_residual);
    iforce = std::max(iforce, p.interface_force.norm());
    itorque = std::max(itorque, std::abs(p.interface_torque));
  }
  const double order = slope(inv_mu, rig);
  // the balance integrals sit at the interface-quadrature noise floor for
  // every penalization in range: assert the floor, not a mu_pen trend
  const bool pass = order >= 0.8 && iforce <= 1e-6 && itorque <= 1e-2;
  report(4, "penalization rigidity", pass,
         fmt("rigidity order %.2f in 1/mu_pen (need >= 0.8), interface force <= %.1e, ", order,
             iforce) +
             fmt("torque <= %.1e (quadrature floor)", itorque));
}

void criterion_corrector(const ReportBundle& bundle) {
  bool ok = !bundle.partial && bundle.rows.size() == 4;
  std::string why;
  if (ok) {
    const auto& r = bundle.rows;
    for (size_t k = 1; k < r.size(); ++k) {
      if (r[k].conv.err_grad_phi > 1.05 * r[k - 1].conv.err_grad_phi) ok = false;
      if (r[k].conv.err_D_u > 1.05 * r[k - 1].conv.err_D_u) ok = false;
    }
    const double ratio = r.back().conv.err_grad_phi / r.back().conv.err_grad_phi_nocorr;
    if (ratio > 0.5) ok = false;
    why = fmt("scalar err %.4f -> %.4f over sweep, ", r.front().conv.err_grad_phi,
              r.back().conv.err_grad_phi) +
          fmt("corrected/uncorrected %.2f at eps=1/32 (need <= 0.5), strain err %.4f -> %.4f",
              ratio, r.front().conv.err_D_u, r.back().conv.err_D_u);
  } else {
    why = "sweep incomplete";
  }
  report(5, "corrector convergence", ok, why);
}

void criterion_lipschitz(const ReportBundle& bundle) {
  bool ok = !bundle.partial && !bundle.rows.empty();
  double worst = 0.0;
  if (ok) {
    const auto& first = bundle.rows.front().conv;
    for (const auto& row : bundle.rows) {
      worst = std::max(worst, row.conv.sup_grad_phi / first.sup_grad_phi);
      worst = std::max(worst, row.conv.sup_grad_Phi1 / first.sup_grad_Phi1);
      worst = std::max(worst, row.conv.sup_grad_Phi2 / first.sup_grad_Phi2);
    }
    ok = worst <= 2.0;
  }
  report(6, "uniform Lipschitz probe", ok,
         fmt("max sup-gradient growth over sweep %.3f relative to eps=1/4 (need <= 2)", worst));
}

// --- criterion 7 ------------------------------------------------------------

void criterion_discretization() {
  // scalar manufactured solution
  std::vector<double> hs, errs;
  for (int n : {16, 32, 64}) {
    const Mesh mesh = make_mesh(n, BoundaryMode::dirichlet);
    SparseOperator K = assemble_scalar(mesh, [](int, const Vec2&) { return Mat2::Identity(); });
    Eigen::VectorXd load = scalar_load_source(mesh, [](int, const Vec2& c) {
      return 2.0 * M_PI * M_PI * std::sin(M_PI * c[0]) * std::sin(M_PI * c[1]);
    });
    auto sys = apply_scalar_dirichlet(mesh, K, load, [](const Vec2&) { return 0.0; });
    CgResult r = solve_spd(sys.K, sys.rhs, 1e-12);
    ScalarField diff{mesh, r.x};
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      const Vec2 x = mesh.node_coord(i);
      diff.nodal[i] -= std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]);
    }
    hs.push_back(mesh.h);
    errs.push_back(l2_norm(diff));
  }
  const double scalar_order = slope(hs, errs);

  // Stokes manufactured solution u = curl((x(1-x)y(1-y))^2), p = sin cos
  auto g = [](double v) { return v * (1.0 - v); };
  auto dg = [](double v) { return 1.0 - 2.0 * v; };
  auto uex = [&](const Vec2& x) {
    return Vec2(g(x[0]) * g(x[0]) * 2.0 * g(x[1]) * dg(x[1]),
                -2.0 * g(x[0]) * dg(x[0]) * g(x[1]) * g(x[1]));
  };
  auto force = [&](const Vec2& x) {
    const double gx = g(x[0]), dgx = dg(x[0]), ky = g(x[1]), dky = dg(x[1]);
    const double d2_g2 = 2.0 * dgx * dgx - 4.0 * gx;
    const double s1 = 2.0 * ky * dky;
    const double u1_xx = d2_g2 * s1;
    const double u1_yy = gx * gx * (-12.0 * dky);
    const double t1 = 2.0 * gx * dgx;
    const double d2_k2 = 2.0 * dky * dky - 4.0 * ky;
    const double u2_xx = 12.0 * dgx * ky * ky;
    const double u2_yy = -t1 * d2_k2;
    return Vec2(-(u1_xx + u1_yy) + M_PI * std::cos(M_PI * x[0]) * std::cos(M_PI * x[1]),
                -(u2_xx + u2_yy) - M_PI * std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]));
  };
  hs.clear();
  errs.clear();
  for (int n : {16, 32, 64}) {
    const Mesh mesh = make_mesh(n, BoundaryMode::dirichlet);
    StokesLoads loads;
    loads.body_force = [&force](int, const Vec2& c) { return force(c); };
    StokesSystem sys =
        assemble_stokes_isotropic(mesh, [](int, const Vec2&) { return 1.0; }, loads, 0.05);
    const SaddleResult r = solve_saddle(sys.op, sys.rhs, 1e-10);
    VectorField diff{mesh, r.velocity};
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      const Vec2 v = uex(mesh.node_coord(i));
      diff.nodal[2 * i] -= v[0];
      diff.nodal[2 * i + 1] -= v[1];
    }
    hs.push_back(mesh.h);
    errs.push_back(l2_norm(diff));
  }
  const double stokes_order = slope(hs, errs);

  const bool pass = scalar_order >= 1.8 && stokes_order >= 1.5;
  report(7, "discretization convergence", pass,
         fmt("manufactured orders: scalar %.2f (need >= 1.8), Stokes velocity %.2f (need >= 1.5)",
             scalar_order, stokes_order));
}

// --- criterion 8 ------------------------------------------------------------

std::string emit_and_digest(const ExperimentConfig& config, const ReportBundle& bundle) {
  ReportBundle scrubbed = bundle;
  for (auto& row : scrubbed.rows) row.conv.wall_time_s = 0.0;  // wall clock varies
  emit_reports(scrubbed, config);
  std::string all;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(config.out_dir))
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) all += f.filename().string() + "\n" + slurp(f);
  return all;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "homog_acceptance";
  fs::remove_all(work);

  criterion_collapse();
  criterion_laminate();

  ExperimentConfig config = default_config((work / "run1").string());
  const CellPipelineResult pipe = run_cell_pipeline(config);
  criterion_tensor_structure(pipe);
  criterion_penalization(config);

  const ReportBundle bundle = run_sweep(config, pipe);
  criterion_corrector(bundle);
  criterion_lipschitz(bundle);
  criterion_discretization();

  // determinism: a full rerun of the default pipeline emits identical CSVs
  // (wall-clock column zeroed on both sides before the byte comparison)
  {
    const std::string first = emit_and_digest(config, bundle);
    ExperimentConfig config2 = default_config((work / "run2").string());
    const CellPipelineResult pipe2 = run_cell_pipeline(config2, /*use_cache=*/false);
    const ReportBundle bundle2 = run_sweep(config2, pipe2);
    const std::string second = emit_and_digest(config2, bundle2);
    report(8, "determinism", !first.empty() && first == second,
           fmt("compared %.0f bytes of CSV reports across two full runs",
               static_cast<double>(first.size())));
  }

  fs::remove_all(work);
  return failures == 0 ? 0 : 1;
}
