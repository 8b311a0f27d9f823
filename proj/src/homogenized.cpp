#include "homog/homogenized.hpp"

#include <random>

namespace homog {

namespace {

Vec2 frac01(const Vec2& y) {
  Vec2 r;
  for (int k = 0; k < 2; ++k) {
    double f = y[k] - std::floor(y[k]);
    if (f >= 1.0) f -= 1.0;
    r[k] = f;
  }
  return r;
}

// centroids of the 4 sub-triangles obtained by edge-midpoint subdivision
std::array<Vec2, 4> subsample_points(const Mesh::Element& el) {
  const Vec2 a = el.vertex[0], b = el.vertex[1], c = el.vertex[2];
  const Vec2 mab = 0.5 * (a + b), mbc = 0.5 * (b + c), mac = 0.5 * (a + c);
  return {Vec2((a + mab + mac) / 3.0), Vec2((mab + b + mbc) / 3.0),
          Vec2((mac + mbc + c) / 3.0), Vec2((mab + mbc + mac) / 3.0)};
}

}  // namespace

HomogenizedSolution solve_scalar_homogenized(const EffectiveTensors& tensors,
                                             const std::function<double(const Vec2&)>& f,
                                             const std::function<double(const Vec2&)>& k,
                                             int resolution, double tol, double max_iter_factor) {
  const Mat2 A = tensors.A;
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-8 * A.norm() ||
      !(A.trace() > 0.0 && A.determinant() > 0.0))
    throw InvariantError("effective permeability must be symmetric elliptic");

  const Mesh mesh = make_mesh(resolution, BoundaryMode::dirichlet);
  SparseOperator K = assemble_scalar(mesh, [&A](int, const Vec2&) { return A; });
  Eigen::VectorXd load = scalar_load_source(mesh, [&](int, const Vec2& c) { return f(c); });
  DirichletScalarSystem sys = apply_scalar_dirichlet(mesh, K, load, k);
  CgResult r = solve_spd(sys.K, sys.rhs, tol, MeanConstraint::none, max_iter_factor);

  HomogenizedSolution hom;
  hom.mesh = mesh;
  hom.tensors = tensors;
  hom.phi0.mesh = mesh;
  hom.phi0.nodal = std::move(r.x);
  hom.iterations = r.iterations;
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (mesh.is_boundary_node(i)) hom.phi0.nodal[i] = sys.boundary_values[i];
  return hom;
}

double legendre_hadamard_beta(const Tensor4& N, int samples, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  double beta = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const double a = angle(rng), b = angle(rng);
    const Vec2 zeta(std::cos(a), std::sin(a)), eta(std::cos(b), std::sin(b));
    beta = std::min(beta, N.legendre_hadamard(zeta, eta));
  }
  return beta;
}

void solve_stokes_homogenized(HomogenizedSolution& hom, const PhysicalParams& params,
                              double stab_beta, double tol, double max_iter_factor) {
  params.validate();
  if (hom.tensors.N.symmetry_defect() > 1e-8)
    throw InvariantError("effective viscosity violates its index symmetries");
  if (legendre_hadamard_beta(hom.tensors.N, 2000) <= 0.0)
    throw InvariantError("effective viscosity violates the Legendre-Hadamard condition");

  const Mesh& mesh = hom.mesh;
  const Tensor4& N = hom.tensors.N;
  const double two_over_re = 2.0 / params.Re;

  // data stress S B^{ij} d_i phi0 d_j phi0 per element
  std::vector<Mat2> data_stress(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Vec2 g = hom.phi0.gradient(e);
    Mat2 t = Mat2::Zero();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) t += params.S * g[i] * g[j] * hom.tensors.B[i][j];
    data_stress[e] = t;
  }

  StokesLoads loads;
  const double fr2 = params.Fr * params.Fr;
  const Vec2 gb = params.g_body;
  loads.body_force = [&gb, fr2](int, const Vec2&) { return Vec2(gb / fr2); };
  loads.extra_stress = [&data_stress](int e, const Vec2&) { return data_stress[e]; };
  StokesSystem sys = assemble_stokes(
      mesh, [&N, two_over_re](int, const Mat2& d) { return Mat2(two_over_re * N.contract(d)); },
      [two_over_re](int, const Vec2&) { return 0.5 * two_over_re; }, loads, stab_beta);
  SaddleResult r = solve_saddle(sys.op, sys.rhs, tol, max_iter_factor);
  hom.u0 = VectorField{mesh, std::move(r.velocity)};
  hom.pi0 = ScalarField{mesh, std::move(r.pressure)};
  hom.stokes_iterations = r.iterations;
}

std::function<Vec2(const Vec2&)> homogenized_gradient(const HomogenizedSolution& hom) {
  const ScalarField phi0 = hom.phi0;
  return [phi0](const Vec2& x) { return phi0.gradient(phi0.mesh.locate(x)); };
}

std::function<Vec2(const Vec2&)> build_corrector_phi1(const HomogenizedSolution& hom,
                                                      const ScalarCellSolution& cell_sol,
                                                      double epsilon) {
  const ScalarField phi0 = hom.phi0;
  const ScalarField w0 = cell_sol.omega[0], w1 = cell_sol.omega[1];
  return [phi0, w0, w1, epsilon](const Vec2& x) {
    const Vec2 g0 = phi0.gradient(phi0.mesh.locate(x));
    const Vec2 y = frac01(Vec2(x / epsilon));
    const int ec = w0.mesh.locate(y);
    return Vec2(g0 + g0[0] * w0.gradient(ec) + g0[1] * w1.gradient(ec));
  };
}

std::function<Mat2(const Vec2&)> homogenized_strain(const HomogenizedSolution& hom) {
  if (!hom.u0) throw ConfigError("homogenized strain requested before the Stokes solve");
  const VectorField u0 = *hom.u0;
  return [u0](const Vec2& x) { return u0.strain(u0.mesh.locate(x)); };
}

std::function<Mat2(const Vec2&)> build_corrector_u1(const HomogenizedSolution& hom,
                                                    const StokesCellSolution& stokes_sol,
                                                    double S, double epsilon, double chi_sign) {
  if (!hom.u0) throw ConfigError("corrector u1 requested before the Stokes solve");
  const VectorField u0 = *hom.u0;
  const ScalarField phi0 = hom.phi0;
  std::array<VectorField, 4> chi, xi;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      chi[2 * i + j] = stokes_sol.chi[i][j].velocity;
      xi[2 * i + j] = stokes_sol.xi[i][j].velocity;
    }
  return [u0, phi0, chi, xi, S, epsilon, chi_sign](const Vec2& x) {
    const int em = u0.mesh.locate(x);
    const Mat2 E = u0.strain(em);
    const Vec2 gphi = phi0.gradient(phi0.mesh.locate(x));
    const Vec2 y = frac01(Vec2(x / epsilon));
    const int ec = chi[0].mesh.locate(y);
    Mat2 out = E;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        out -= chi_sign * E(i, j) * chi[2 * i + j].strain(ec);
        out += S * gphi[i] * gphi[j] * xi[2 * i + j].strain(ec);
      }
    return out;
  };
}

double corrector_error_scalar(const FineScaleSolution& fine,
                              const std::function<Vec2(const Vec2&)>& ref) {
  const Mesh& mesh = fine.mesh;
  const double w = mesh.elem_area() / 4.0;
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mesh::Element el = mesh.element(e);
    const Vec2 gf = fine.phi.gradient(e);
    for (const Vec2& q : subsample_points(el)) s += w * (gf - ref(q)).squaredNorm();
  }
  return std::sqrt(s);
}

double corrector_error_stokes(const FineScaleSolution& fine,
                              const std::function<Mat2(const Vec2&)>& ref) {
  if (!fine.u) throw ConfigError("corrector_error_stokes: fine solution has no velocity");
  const Mesh& mesh = fine.mesh;
  const double w = mesh.elem_area() / 4.0;
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mesh::Element el = mesh.element(e);
    const Mat2 Df = fine.u->strain(e);
    for (const Vec2& q : subsample_points(el)) s += w * (Df - ref(q)).squaredNorm();
  }
  return std::sqrt(s);
}

}  // namespace homog
