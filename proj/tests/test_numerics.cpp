#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "homog/assemble.hpp"

using namespace homog;

namespace {

ScalarField nodal_field(const Mesh& mesh, const std::function<double(const Vec2&)>& f) {
  ScalarField out;
  out.mesh = mesh;
  out.nodal.resize(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) out.nodal[i] = f(mesh.node_coord(i));
  return out;
}

VectorField nodal_vfield(const Mesh& mesh, const std::function<Vec2(const Vec2&)>& f) {
  VectorField out;
  out.mesh = mesh;
  out.nodal.resize(2 * mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const Vec2 v = f(mesh.node_coord(i));
    out.nodal[2 * i] = v[0];
    out.nodal[2 * i + 1] = v[1];
  }
  return out;
}

double slope(const std::vector<double>& h, const std::vector<double>& err) {
  double mx = 0.0, my = 0.0, num = 0.0, den = 0.0;
  const size_t n = h.size();
  for (size_t k = 0; k < n; ++k) {
    mx += std::log(h[k]);
    my += std::log(err[k]);
  }
  mx /= n;
  my /= n;
  for (size_t k = 0; k < n; ++k) {
    num += (std::log(h[k]) - mx) * (std::log(err[k]) - my);
    den += (std::log(h[k]) - mx) * (std::log(h[k]) - mx);
  }
  return num / den;
}

// manufactured Stokes pair: u = curl (g(x)^2 k(y)^2), p = sin(pi x) cos(pi y)
struct Manufactured {
  static double g(double x) { return x * (1.0 - x); }
  static double dg(double x) { return 1.0 - 2.0 * x; }
  static constexpr double ddg = -2.0;

  static Vec2 u(const Vec2& x) {
    const double gx = g(x[0]), ky = g(x[1]);
    return Vec2(gx * gx * 2.0 * ky * dg(x[1]), -2.0 * gx * dg(x[0]) * ky * ky);
  }
  // -Laplace(u) for mu = 1 (viscous stress 2 mu D(u) with div u = 0)
  static Vec2 neg_lap_u(const Vec2& x) {
    const double gx = g(x[0]), dgx = dg(x[0]), ky = g(x[1]), dky = dg(x[1]);
    // u1 = g^2 * (2 k k'), u2 = -(2 g g') * k^2
    const double d2_g2 = 2.0 * dgx * dgx + 2.0 * gx * ddg;       // (g^2)''
    const double s1 = 2.0 * ky * dky;                            // (k^2)'
    const double d2_s1 = 6.0 * dky * ddg;                        // (2kk')'' = 6 k' k''
    const double u1_xx = d2_g2 * s1;
    const double u1_yy = gx * gx * d2_s1;
    const double t1 = 2.0 * gx * dgx;                            // (g^2)'
    const double d2_t1 = 6.0 * dgx * ddg;
    const double d2_k2 = 2.0 * dky * dky + 2.0 * ky * ddg;
    const double u2_xx = -d2_t1 * ky * ky;
    const double u2_yy = -t1 * d2_k2;
    return Vec2(-(u1_xx + u1_yy), -(u2_xx + u2_yy));
  }
  static Vec2 grad_p(const Vec2& x) {
    return Vec2(M_PI * std::cos(M_PI * x[0]) * std::cos(M_PI * x[1]),
                -M_PI * std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]));
  }
};

}  // namespace

TEST_CASE("periodic stiffness annihilates constants") {
  const Mesh mesh = make_mesh(16, BoundaryMode::periodic);
  SparseOperator K = assemble_scalar(mesh, [](int, const Vec2&) { return Mat2::Identity(); });
  CHECK(K.constant_kernel_defect() <= 1e-10 * K.max_abs());
  CHECK(K.asymmetry() <= 1e-12 * K.max_abs());
}

TEST_CASE("structured P1 Laplacian has the five-point Fourier eigenpair") {
  const int n = 32;
  const Mesh mesh = make_mesh(n, BoundaryMode::periodic);
  SparseOperator K = assemble_scalar(mesh, [](int, const Vec2&) { return Mat2::Identity(); });
  const ScalarField s = nodal_field(mesh, [](const Vec2& x) { return std::sin(2.0 * M_PI * x[0]); });
  const double mu_h = 4.0 * std::pow(std::sin(M_PI * mesh.h), 2) / (mesh.h * mesh.h);
  Eigen::VectorXd Ks = K.K * s.nodal;
  // stiffness rows carry no h^2 mass factor: K s = h^2 * mu_h * s exactly
  const Eigen::VectorXd expect = (mesh.h * mesh.h * mu_h) * s.nodal;
  CHECK((Ks - expect).cwiseAbs().maxCoeff() <= 1e-10);

  // CG inverts the eigenpair in the zero-mean subspace
  CgResult r = solve_spd(K, Ks, 1e-12, MeanConstraint::zero_mean);
  CHECK(r.relative_residual <= 1e-12);
  CHECK((r.x - s.nodal).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("manufactured scalar Dirichlet solution converges with order >= 1.8") {
  std::vector<double> hs, errs;
  for (int n : {16, 32, 64}) {
    const Mesh mesh = make_mesh(n, BoundaryMode::dirichlet);
    SparseOperator K = assemble_scalar(mesh, [](int, const Vec2&) { return Mat2::Identity(); });
    Eigen::VectorXd load = scalar_load_source(mesh, [](int, const Vec2& c) {
      return 2.0 * M_PI * M_PI * std::sin(M_PI * c[0]) * std::sin(M_PI * c[1]);
    });
    auto sys = apply_scalar_dirichlet(mesh, K, load, [](const Vec2&) { return 0.0; });
    CgResult r = solve_spd(sys.K, sys.rhs, 1e-12);
    ScalarField diff = nodal_field(
        mesh, [](const Vec2& x) { return std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]); });
    diff.nodal -= r.x;
    hs.push_back(mesh.h);
    errs.push_back(l2_norm(diff));
  }
  CHECK(slope(hs, errs) >= 1.8);
}

TEST_CASE("constant-gradient energy is exact") {
  const Mesh mesh = make_mesh(16, BoundaryMode::dirichlet);
  SparseOperator K =
      assemble_scalar(mesh, [](int, const Vec2&) { return Vec2(2.0, 3.0).asDiagonal().toDenseMatrix(); });
  const ScalarField v = nodal_field(mesh, [](const Vec2& x) { return x[0] + x[1]; });
  CHECK(energy(K, v.nodal) == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("non-elliptic element coefficient rejected") {
  const Mesh mesh = make_mesh(8, BoundaryMode::periodic);
  Mat2 bad;
  bad << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(assemble_scalar(mesh, [&](int, const Vec2&) { return bad; }), InvariantError);
}

TEST_CASE("CG solves the identity in one iteration") {
  SparseOperator I;
  I.K.resize(50, 50);
  I.K.setIdentity();
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(50, -1.0, 2.0);
  CgResult r = solve_spd(I, b, 1e-12);
  CHECK(r.iterations == 1);
  CHECK((r.x - b).norm() <= 1e-13);
}

TEST_CASE("zero-mean mode rejects incompatible rhs") {
  const Mesh mesh = make_mesh(8, BoundaryMode::periodic);
  SparseOperator K = assemble_scalar(mesh, [](int, const Vec2&) { return Mat2::Identity(); });
  Eigen::VectorXd b = Eigen::VectorXd::Ones(mesh.num_nodes());
  CHECK_THROWS_AS(solve_spd(K, b, 1e-10, MeanConstraint::zero_mean), SolveError);
}

TEST_CASE("Galerkin symmetry for random coefficient fields") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unif(0.2, 3.0);
  const Mesh mesh = make_mesh(12, BoundaryMode::periodic);
  for (int t = 0; t < 20; ++t) {
    std::vector<Mat2> coeffs(mesh.num_elements());
    for (auto& a : coeffs) {
      const double d1 = unif(rng), d2 = unif(rng);
      const double off = 0.4 * std::min(d1, d2) * (unif(rng) - 1.6);
      a << d1, off, off, d2;
    }
    SparseOperator K = assemble_scalar(mesh, [&](int e, const Vec2&) { return coeffs[e]; });
    CHECK(K.asymmetry() <= 1e-12 * K.max_abs());
  }
}

TEST_CASE("field norms") {
  const Mesh mesh = make_mesh(128, BoundaryMode::dirichlet);
  const ScalarField c = nodal_field(mesh, [](const Vec2&) { return -2.5; });
  CHECK(l2_norm(c) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(sup_norm(c) == doctest::Approx(2.5));
  const ScalarField lin = nodal_field(mesh, [](const Vec2& x) { return x[0]; });
  CHECK(h1_seminorm(lin) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sup_grad(lin) == doctest::Approx(1.0).epsilon(1e-12));
  const ScalarField s =
      nodal_field(mesh, [](const Vec2& x) { return std::sin(2.0 * M_PI * x[0]); });
  CHECK(std::abs(l2_norm(s) - 1.0 / std::sqrt(2.0)) <= 1e-3);
}

// --- Stokes -----------------------------------------------------------------

TEST_CASE("homogeneous periodic Stokes: zero rhs and zero solution") {
  const Mesh mesh = make_mesh(16, BoundaryMode::periodic);
  StokesSystem sys =
      assemble_stokes_isotropic(mesh, [](int, const Vec2&) { return 1.0; }, StokesLoads{}, 0.05);
  CHECK(sys.rhs.norm() == 0.0);
  CHECK(sys.op.composite_asymmetry() <= 1e-12);
  SaddleResult r = solve_saddle(sys.op, sys.rhs, 1e-10);
  CHECK(r.velocity.norm() == 0.0);
  CHECK(r.pressure.norm() == 0.0);

  // A is PSD after deflating the translations
  std::mt19937 rng(5);
  std::normal_distribution<double> gauss;
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd z(3 * mesh.num_nodes());
    for (int i = 0; i < z.size(); ++i) z[i] = gauss(rng);
    sys.op.project_kernel(z);
    const Eigen::VectorXd zv = z.head(sys.op.nv);
    CHECK(zv.dot(sys.op.A * zv) >= -1e-12 * zv.squaredNorm());
  }
}

TEST_CASE("constant extra stress is equilibrated on the periodic mesh") {
  const Mesh mesh = make_mesh(16, BoundaryMode::periodic);
  StokesLoads loads;
  Mat2 tau;
  tau << 1.3, -0.4, -0.4, 0.7;
  loads.extra_stress = [&tau](int, const Vec2&) { return tau; };
  StokesSystem sys =
      assemble_stokes_isotropic(mesh, [](int, const Vec2&) { return 1.0; }, loads, 0.05);
  CHECK(sys.rhs.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("non-positive viscosity rejected") {
  const Mesh mesh = make_mesh(8, BoundaryMode::periodic);
  CHECK_THROWS_AS(
      assemble_stokes_isotropic(mesh, [](int, const Vec2&) { return 0.0; }, StokesLoads{}, 0.05),
      InvariantError);
}

TEST_CASE("pressure-constant rhs component rejected") {
  const Mesh mesh = make_mesh(8, BoundaryMode::periodic);
  StokesSystem sys =
      assemble_stokes_isotropic(mesh, [](int, const Vec2&) { return 1.0; }, StokesLoads{}, 0.05);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(sys.op.dimension());
  b.tail(sys.op.np).setOnes();
  CHECK_THROWS_AS(solve_saddle(sys.op, b, 1e-10), SolveError);
}

TEST_CASE("manufactured Stokes solution converges with order >= 1.5") {
  std::vector<double> hs, errs;
  for (int n : {16, 32, 64}) {
    const Mesh mesh = make_mesh(n, BoundaryMode::dirichlet);
    StokesLoads loads;
    loads.body_force = [](int, const Vec2& c) {
      return Vec2(Manufactured::neg_lap_u(c) + Manufactured::grad_p(c));
    };
    StokesSystem sys =
        assemble_stokes_isotropic(mesh, [](int, const Vec2&) { return 1.0; }, loads, 0.05);
    SaddleResult r = solve_saddle(sys.op, sys.rhs, 1e-10);
    CHECK(r.relative_residual <= 1e-10);
    VectorField diff = nodal_vfield(mesh, Manufactured::u);
    diff.nodal -= r.velocity;
    hs.push_back(mesh.h);
    errs.push_back(l2_norm(diff));
  }
  CHECK(slope(hs, errs) >= 1.5);
}

TEST_CASE("lid-driven cavity divergence is small and improves under refinement") {
  auto run = [](int n) {
    const Mesh mesh = make_mesh(n, BoundaryMode::dirichlet);
    StokesLoads loads;
    loads.boundary_velocity = [](const Vec2& x) {
      // regularized lid so the boundary data is H^{1/2}-conforming
      if (x[1] >= 1.0 - 1e-12) {
        const double s = x[0] * (1.0 - x[0]);
        return Vec2(16.0 * s * s, 0.0);
      }
      return Vec2(0.0, 0.0);
    };
    StokesSystem sys =
        assemble_stokes_isotropic(mesh, [](int, const Vec2&) { return 1.0; }, loads, 0.05);
    SaddleResult r = solve_saddle(sys.op, sys.rhs, 1e-10);
    VectorField u{mesh, r.velocity};
    return divergence_l2(u);
  };
  const double d64 = run(64), d128 = run(128);
  // equal-order stabilized elements give an O(h) divergence leak; what is
  // checked is the magnitude at n=64 and clean first-order decay
  CHECK(d64 <= 0.1);
  CHECK(d128 <= 0.55 * d64);
}

TEST_CASE("solver contract: residual never exceeds the requested tolerance") {
  const Mesh mesh = make_mesh(24, BoundaryMode::periodic);
  SparseOperator K = assemble_scalar(mesh, [](int, const Vec2&) { return Mat2::Identity(); });
  Eigen::VectorXd b = scalar_load_flux(mesh, [](int, const Vec2&) { return Vec2(1.0, -0.5); });
  for (double tol : {1e-6, 1e-8, 1e-10, 1e-12}) {
    CgResult r = solve_spd(K, b, tol, MeanConstraint::zero_mean);
    CHECK(r.relative_residual <= tol);
  }
}
