#include "homog/harness.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>

#include <json.hpp>

namespace homog {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check(bool ok, const std::string& name) {
  if (!ok) throw InvariantError("invariant violated: " + name);
}

// --- binary cell cache ------------------------------------------------------

constexpr uint64_t kCacheMagic = 0x484f4d4f47434c31ull;  // "HOMOGCL1"

void put_vec(std::ofstream& o, const Eigen::VectorXd& v) {
  const uint64_t n = v.size();
  o.write(reinterpret_cast<const char*>(&n), sizeof(n));
  o.write(reinterpret_cast<const char*>(v.data()), n * sizeof(double));
}

Eigen::VectorXd get_vec(std::ifstream& i) {
  uint64_t n = 0;
  i.read(reinterpret_cast<char*>(&n), sizeof(n));
  Eigen::VectorXd v(n);
  i.read(reinterpret_cast<char*>(v.data()), n * sizeof(double));
  return v;
}

void put_d(std::ofstream& o, double d) { o.write(reinterpret_cast<const char*>(&d), sizeof(d)); }
double get_d(std::ifstream& i) {
  double d = 0;
  i.read(reinterpret_cast<char*>(&d), sizeof(d));
  return d;
}

void save_cell_cache(const fs::path& file, const CellPipelineResult& r) {
  std::ofstream o(file, std::ios::binary);
  if (!o) return;  // cache is best-effort
  o.write(reinterpret_cast<const char*>(&kCacheMagic), sizeof(kCacheMagic));
  const uint64_t n = r.cell.resolution;
  o.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (int i = 0; i < 2; ++i) put_vec(o, r.scalar.omega[i].nodal);
  for (int i = 0; i < 2; ++i) {
    put_d(o, r.scalar.sup_omega[i]);
    put_d(o, r.scalar.sup_grad_omega[i]);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (const StokesCellProblem* p : {&r.stokes.chi[i][j], &r.stokes.xi[i][j]}) {
        put_vec(o, p->velocity.nodal);
        put_vec(o, p->pressure.nodal);
        put_d(o, p->rigidity_residual);
        put_d(o, p->divergence_norm);
        put_d(o, p->interface_force[0]);
        put_d(o, p->interface_force[1]);
        put_d(o, p->interface_torque);
        put_d(o, p->iterations);
      }
  put_d(o, r.stokes.mu_pen);
  put_d(o, r.lh_beta);
  put_d(o, r.solid_fraction);
  for (int i = 0; i < 4; ++i) put_d(o, r.tensors.A(i / 2, i % 2));
  for (double v : r.tensors.N.v) put_d(o, v);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 4; ++k) put_d(o, r.tensors.B[i][j](k / 2, k % 2));
}

bool load_cell_cache(const fs::path& file, CellPipelineResult& r) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return false;
  uint64_t magic = 0, n = 0;
  in.read(reinterpret_cast<char*>(&magic), sizeof(magic));
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (magic != kCacheMagic || static_cast<int>(n) != r.cell.resolution) return false;
  const Mesh mesh = make_mesh(r.cell.resolution, BoundaryMode::periodic);
  r.scalar.mesh = mesh;
  for (int i = 0; i < 2; ++i) {
    r.scalar.omega[i].mesh = mesh;
    r.scalar.omega[i].nodal = get_vec(in);
  }
  for (int i = 0; i < 2; ++i) {
    r.scalar.sup_omega[i] = get_d(in);
    r.scalar.sup_grad_omega[i] = get_d(in);
  }
  r.stokes.mesh = mesh;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (StokesCellProblem* p : {&r.stokes.chi[i][j], &r.stokes.xi[i][j]}) {
        p->velocity.mesh = mesh;
        p->velocity.nodal = get_vec(in);
        p->pressure.mesh = mesh;
        p->pressure.nodal = get_vec(in);
        p->rigidity_residual = get_d(in);
        p->divergence_norm = get_d(in);
        p->interface_force[0] = get_d(in);
        p->interface_force[1] = get_d(in);
        p->interface_torque = get_d(in);
        p->iterations = static_cast<int>(get_d(in));
      }
  r.stokes.mu_pen = get_d(in);
  r.lh_beta = get_d(in);
  r.solid_fraction = get_d(in);
  for (int i = 0; i < 4; ++i) r.tensors.A(i / 2, i % 2) = get_d(in);
  for (double& v : r.tensors.N.v) v = get_d(in);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 4; ++k) r.tensors.B[i][j](k / 2, k % 2) = get_d(in);
  if (!in) return false;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.stokes.tau_ref[i][j] = maxwell_cell_stress(r.cell, r.scalar, i, j);
  return true;
}

void assert_tensor_invariants(const CellPipelineResult& r) {
  const Mat2& A = r.tensors.A;
  check((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + A.norm()),
        "effective permeability symmetry");
  Eigen::SelfAdjointEigenSolver<Mat2> es(A);
  const double lam = r.cell.coeff.lambda_min(), Lam = r.cell.coeff.lambda_max();
  check(es.eigenvalues().minCoeff() >= lam - 1e-8 && es.eigenvalues().maxCoeff() <= Lam + 1e-8,
        "effective permeability eigenvalues within [lambda, Lambda]");
  // Voigt-Reuss bracket from the measured volume fraction
  {
    const double th = r.solid_fraction;
    const Mat2 voigt = th * r.cell.coeff.a_in + (1.0 - th) * r.cell.coeff.a_out;
    const Mat2 reuss =
        (th * r.cell.coeff.a_in.inverse() + (1.0 - th) * r.cell.coeff.a_out.inverse()).inverse();
    Eigen::SelfAdjointEigenSolver<Mat2> ev(voigt), er(reuss);
    check(es.eigenvalues().minCoeff() >= er.eigenvalues().minCoeff() - 1e-8,
          "effective permeability above the Reuss bound");
    check(es.eigenvalues().maxCoeff() <= ev.eigenvalues().maxCoeff() + 1e-8,
          "effective permeability below the Voigt bound");
  }
  for (int i = 0; i < 2; ++i)
    check(std::abs(mean(r.scalar.omega[i])) <= 1e-12, "zero-mean corrector");
  check(r.tensors.N.symmetry_defect() <= 1e-8, "effective viscosity index symmetries");
  check(r.lh_beta > 0.0, "Legendre-Hadamard positivity");
  // B^{ij} = (B^{ji})^T: xi^{ij} = xi^{ji} since only sym(tau_ref) loads the
  // problem, and the tau means are transposes of each other.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      check((r.tensors.B[i][j] - r.tensors.B[j][i].transpose()).cwiseAbs().maxCoeff() <= 1e-6,
            "effective coupling ij-symmetry");
}

}  // namespace

void write_tensor_csvs(const EffectiveTensors& t, const std::string& dir) {
  fs::create_directories(dir);
  {
    std::ofstream o(fs::path(dir) / "effective_A.csv");
    o << "j,k,value\n";
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) o << j + 1 << "," << k + 1 << "," << fmt(t.A(j, k)) << "\n";
  }
  {
    std::ofstream o(fs::path(dir) / "effective_N.csv");
    o << "i,j,m,n,value\n";
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int m = 0; m < 2; ++m)
          for (int n = 0; n < 2; ++n)
            o << i + 1 << "," << j + 1 << "," << m + 1 << "," << n + 1 << ","
              << fmt(t.N(i, j, m, n)) << "\n";
  }
  {
    std::ofstream o(fs::path(dir) / "effective_B.csv");
    o << "i,j,row,col,value\n";
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int rr = 0; rr < 2; ++rr)
          for (int cc = 0; cc < 2; ++cc)
            o << i + 1 << "," << j + 1 << "," << rr + 1 << "," << cc + 1 << ","
              << fmt(t.B[i][j](rr, cc)) << "\n";
  }
}

CellPipelineResult run_cell_pipeline(const ExperimentConfig& config, bool use_cache) {
  config.validate();
  CellPipelineResult r;
  r.cell = build_unit_cell(config.inclusion, config.coeff, config.cell_resolution);
  r.solid_fraction = r.cell.solid_fraction();

  const fs::path cache_dir = fs::path(config.out_dir) / "cache";
  const fs::path cache_file = cache_dir / ("cell_" + config.cell_hash() + ".bin");
  if (use_cache && load_cell_cache(cache_file, r)) {
    r.lh_beta = legendre_hadamard_beta(r.tensors.N, 10000, config.seed);
    assert_tensor_invariants(r);
    r.from_cache = true;
    write_tensor_csvs(r.tensors, config.out_dir);
    return r;
  }

  r.scalar = solve_correctors(r.cell, config.tol_cell, config.max_iter_factor);
  r.tensors.A = effective_permeability(r.cell, r.scalar);
  // primary consistency test of the periodic assembly
  {
    const Mat2 Aflux = effective_permeability_flux_form(r.cell, r.scalar);
    check((r.tensors.A - Aflux).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + r.tensors.A.norm()),
          "energy/flux form agreement of the effective permeability");
  }

  StokesCellOptions opt;
  opt.mu_pen = config.mu_pen;
  opt.stab_beta = config.stab_beta;
  opt.tol = config.tol_cell;
  opt.max_iter_factor = config.max_iter_factor;
  r.stokes = solve_stokes_cell(r.cell, r.scalar, opt, config.workers);
  r.tensors.N = effective_viscosity(r.cell, r.stokes);
  r.tensors.B = effective_coupling(r.cell, r.stokes);
  r.lh_beta = legendre_hadamard_beta(r.tensors.N, 10000, config.seed);

  assert_tensor_invariants(r);
  write_tensor_csvs(r.tensors, config.out_dir);
  if (use_cache) {
    fs::create_directories(cache_dir);
    save_cell_cache(cache_file, r);
  }
  return r;
}

ReportBundle run_sweep(const ExperimentConfig& config, const CellPipelineResult& cellres) {
  config.validate();
  ReportBundle bundle;
  bundle.tensors = cellres.tensors;
  bundle.config_hash = config.config_hash();
  bundle.lh_beta = cellres.lh_beta;

  const PhysicalParams params = config.physical();
  const auto f = params.f_source;
  const auto k = params.k_bc;

  HomogenizedSolution hom = solve_scalar_homogenized(cellres.tensors, f, k, config.hom_resolution,
                                                     config.tol_macro, config.max_iter_factor);
  if (config.with_stokes)
    solve_stokes_homogenized(hom, params, config.stab_beta, config.tol_macro,
                             config.max_iter_factor);

  for (int m : config.sweep_m) {
    SweepRow row;
    row.conv.epsilon = 1.0 / m;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      MacroGeometry macro =
          build_macro_domain(cellres.cell, m, config.macro_resolution_per_cell);

      FineScaleSolution fine;
      FineScaleSolution corr1, corr2;
      if (config.workers > 1) {
        auto ffine = std::async(std::launch::async, [&] {
          return solve_scalar_finescale(macro, f, k, config.tol_macro, config.max_iter_factor);
        });
        auto f1 = std::async(std::launch::async, [&] {
          return dirichlet_corrector(macro, 0, config.tol_macro, config.max_iter_factor);
        });
        auto f2 = std::async(std::launch::async, [&] {
          return dirichlet_corrector(macro, 1, config.tol_macro, config.max_iter_factor);
        });
        fine = ffine.get();
        corr1 = f1.get();
        corr2 = f2.get();
      } else {
        fine = solve_scalar_finescale(macro, f, k, config.tol_macro, config.max_iter_factor);
        corr1 = dirichlet_corrector(macro, 0, config.tol_macro, config.max_iter_factor);
        corr2 = dirichlet_corrector(macro, 1, config.tol_macro, config.max_iter_factor);
      }

      row.conv.sup_grad_phi = gradient_sup(fine);
      row.conv.sup_grad_Phi1 = gradient_sup(corr1);
      row.conv.sup_grad_Phi2 = gradient_sup(corr2);
      row.conv.energy_residual = fine.energy_residual;
      row.scalar_iterations = fine.iterations;

      auto corrected = build_corrector_phi1(hom, cellres.scalar, macro.epsilon());
      auto plain = homogenized_gradient(hom);
      row.conv.err_grad_phi = corrector_error_scalar(fine, corrected);
      row.conv.err_grad_phi_nocorr = corrector_error_scalar(fine, plain);

      if (config.with_stokes) {
        SuspensionOptions sopt;
        sopt.mu_pen = config.mu_pen;
        sopt.stab_beta = config.stab_beta;
        sopt.tol = config.tol_macro;
        sopt.max_iter_factor = config.max_iter_factor;
        solve_suspension_finescale(macro, params, fine, sopt);
        row.stokes_iterations = fine.stokes_iterations;
        row.rigidity_fraction = fine.rigidity_fraction;
        for (const ParticleDiagnostics& pd : fine.particles)
          row.max_particle_force = std::max(row.max_particle_force, pd.force.norm());

        auto cstrain = build_corrector_u1(hom, cellres.stokes, params.S, macro.epsilon());
        auto pstrain = homogenized_strain(hom);
        row.conv.err_D_u = corrector_error_stokes(fine, cstrain);
        row.conv.err_D_u_nocorr = corrector_error_stokes(fine, pstrain);
      }
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
      bundle.partial = true;
    }
    row.conv.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bundle.rows.push_back(std::move(row));
  }
  return bundle;
}

void emit_reports(const ReportBundle& bundle, const ExperimentConfig& config) {
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::exists(dir)) throw ConfigError("unwritable output directory '" + config.out_dir + "'");

  write_tensor_csvs(bundle.tensors, config.out_dir);
  {
    std::ofstream o(dir / "convergence_report.csv");
    o << "epsilon,err_grad_phi,err_grad_phi_nocorr,err_D_u,err_D_u_nocorr,sup_grad_phi,"
         "wall_time_s\n";
    for (const SweepRow& r : bundle.rows)
      o << fmt(r.conv.epsilon) << "," << fmt(r.conv.err_grad_phi) << ","
        << fmt(r.conv.err_grad_phi_nocorr) << "," << fmt(r.conv.err_D_u) << ","
        << fmt(r.conv.err_D_u_nocorr) << "," << fmt(r.conv.sup_grad_phi) << ","
        << fmt(r.conv.wall_time_s) << "\n";
  }
  {
    std::ofstream o(dir / "sweep_gradients.csv");
    o << "epsilon,sup_grad_phi,sup_grad_Phi1,sup_grad_Phi2,energy_residual\n";
    for (const SweepRow& r : bundle.rows)
      o << fmt(r.conv.epsilon) << "," << fmt(r.conv.sup_grad_phi) << ","
        << fmt(r.conv.sup_grad_Phi1) << "," << fmt(r.conv.sup_grad_Phi2) << ","
        << fmt(r.conv.energy_residual) << "\n";
  }
  // plot-ready columns, one file per metric
  const std::pair<const char*, double ConvergenceRow::*> metrics[] = {
      {"err_grad_phi", &ConvergenceRow::err_grad_phi},
      {"err_grad_phi_nocorr", &ConvergenceRow::err_grad_phi_nocorr},
      {"err_D_u", &ConvergenceRow::err_D_u},
      {"err_D_u_nocorr", &ConvergenceRow::err_D_u_nocorr},
      {"sup_grad_phi", &ConvergenceRow::sup_grad_phi}};
  for (const auto& [name, member] : metrics) {
    std::ofstream o(dir / (std::string("plot_") + name + ".csv"));
    o << "epsilon," << name << "\n";
    for (const SweepRow& r : bundle.rows)
      o << fmt(r.conv.epsilon) << "," << fmt(r.conv.*member) << "\n";
  }

  // JSON bundle: always written (it backs the `report` verb); a formatted
  // mirror only when requested.
  json j;
  j["config_hash"] = bundle.config_hash;
  j["status"] = bundle.partial ? "partial" : "complete";
  j["lh_beta"] = bundle.lh_beta;
  j["tensors"]["A"] = {{bundle.tensors.A(0, 0), bundle.tensors.A(0, 1)},
                       {bundle.tensors.A(1, 0), bundle.tensors.A(1, 1)}};
  j["tensors"]["N"] = bundle.tensors.N.v;
  for (int i = 0; i < 2; ++i)
    for (int jj = 0; jj < 2; ++jj)
      j["tensors"]["B"].push_back({{"i", i + 1},
                                   {"j", jj + 1},
                                   {"value",
                                    {{bundle.tensors.B[i][jj](0, 0), bundle.tensors.B[i][jj](0, 1)},
                                     {bundle.tensors.B[i][jj](1, 0),
                                      bundle.tensors.B[i][jj](1, 1)}}}});
  for (const SweepRow& r : bundle.rows) {
    json row;
    row["epsilon"] = r.conv.epsilon;
    row["err_grad_phi"] = r.conv.err_grad_phi;
    row["err_grad_phi_nocorr"] = r.conv.err_grad_phi_nocorr;
    row["err_D_u"] = r.conv.err_D_u;
    row["err_D_u_nocorr"] = r.conv.err_D_u_nocorr;
    row["sup_grad_phi"] = r.conv.sup_grad_phi;
    row["sup_grad_Phi1"] = r.conv.sup_grad_Phi1;
    row["sup_grad_Phi2"] = r.conv.sup_grad_Phi2;
    row["energy_residual"] = r.conv.energy_residual;
    row["wall_time_s"] = r.conv.wall_time_s;
    row["rigidity_fraction"] = r.rigidity_fraction;
    row["max_particle_force"] = r.max_particle_force;
    row["scalar_iterations"] = r.scalar_iterations;
    row["stokes_iterations"] = r.stokes_iterations;
    row["failed"] = r.failed;
    if (r.failed) row["error"] = r.error;
    row["config_hash"] = bundle.config_hash;
    j["rows"].push_back(row);
  }
  std::ofstream(dir / "bundle.json") << j.dump(2) << "\n";
  if (config.formats == "json" || config.formats == "both")
    std::ofstream(dir / "report.json") << j.dump(2) << "\n";
}

void reemit_from_cache(const ExperimentConfig& config) {
  const fs::path file = fs::path(config.out_dir) / "bundle.json";
  std::ifstream in(file);
  if (!in) throw ConfigError("no cached bundle at '" + file.string() + "' (run sweep first)");
  json j = json::parse(in);
  ReportBundle bundle;
  bundle.config_hash = j.value("config_hash", "");
  bundle.partial = j.value("status", "complete") == "partial";
  bundle.lh_beta = j.value("lh_beta", 0.0);
  const auto& A = j["tensors"]["A"];
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) bundle.tensors.A(r, c) = A[r][c].get<double>();
  const auto& N = j["tensors"]["N"];
  for (int i = 0; i < 16; ++i) bundle.tensors.N.v[i] = N[i].get<double>();
  for (const auto& bitem : j["tensors"]["B"]) {
    const int i = bitem["i"].get<int>() - 1, jj = bitem["j"].get<int>() - 1;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) bundle.tensors.B[i][jj](r, c) = bitem["value"][r][c].get<double>();
  }
  for (const auto& row : j["rows"]) {
    SweepRow r;
    r.conv.epsilon = row.value("epsilon", 0.0);
    r.conv.err_grad_phi = row.value("err_grad_phi", 0.0);
    r.conv.err_grad_phi_nocorr = row.value("err_grad_phi_nocorr", 0.0);
    r.conv.err_D_u = row.value("err_D_u", 0.0);
    r.conv.err_D_u_nocorr = row.value("err_D_u_nocorr", 0.0);
    r.conv.sup_grad_phi = row.value("sup_grad_phi", 0.0);
    r.conv.sup_grad_Phi1 = row.value("sup_grad_Phi1", 0.0);
    r.conv.sup_grad_Phi2 = row.value("sup_grad_Phi2", 0.0);
    r.conv.energy_residual = row.value("energy_residual", 0.0);
    r.conv.wall_time_s = row.value("wall_time_s", 0.0);
    r.rigidity_fraction = row.value("rigidity_fraction", 0.0);
    r.max_particle_force = row.value("max_particle_force", 0.0);
    r.failed = row.value("failed", false);
    bundle.rows.push_back(std::move(r));
  }
  emit_reports(bundle, config);
}

}  // namespace homog
