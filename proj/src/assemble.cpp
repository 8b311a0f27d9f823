#include "homog/assemble.hpp"

#include <vector>

namespace homog {

namespace {

Mat2 basis_strain(int k, const Vec2& g) {
  Mat2 d = Mat2::Zero();
  d.row(k) = g.transpose();
  return 0.5 * (d + d.transpose());
}

void check_elliptic(const Mat2& a, int e) {
  if (!(a.trace() > 0.0 && a.determinant() > 0.0))
    throw InvariantError("non-elliptic coefficient on element " + std::to_string(e));
}

}  // namespace

SparseOperator assemble_scalar(const Mesh& mesh, const MatrixSampler& coeff) {
  const int nn = mesh.num_nodes();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(mesh.num_elements()) * 9);
  const double area = mesh.elem_area();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mesh::Element el = mesh.element(e);
    const Mat2 a = coeff(e, el.centroid);
    check_elliptic(a, e);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double v = area * el.grad[i].dot(a * el.grad[j]);
        trip.emplace_back(el.node[i], el.node[j], v);
      }
  }
  SparseOperator op;
  op.K.resize(nn, nn);
  op.K.setFromTriplets(trip.begin(), trip.end());
  op.symmetric = true;
  return op;
}

Eigen::VectorXd scalar_load_source(const Mesh& mesh, const ScalarSampler& f) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.num_nodes());
  const double w = mesh.elem_area() / 3.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mesh::Element el = mesh.element(e);
    const double fe = f(e, el.centroid);
    for (int a = 0; a < 3; ++a) b[el.node[a]] += w * fe;
  }
  return b;
}

Eigen::VectorXd scalar_load_flux(const Mesh& mesh, const VectorSampler& g) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.num_nodes());
  const double area = mesh.elem_area();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mesh::Element el = mesh.element(e);
    const Vec2 ge = g(e, el.centroid);
    for (int a = 0; a < 3; ++a) b[el.node[a]] += area * ge.dot(el.grad[a]);
  }
  return b;
}

double energy(const SparseOperator& K, const Eigen::VectorXd& v) { return v.dot(K.K * v); }

DirichletScalarSystem apply_scalar_dirichlet(const Mesh& mesh, const SparseOperator& K,
                                             const Eigen::VectorXd& load,
                                             const std::function<double(const Vec2&)>& g) {
  const int nn = mesh.num_nodes();
  Eigen::VectorXd bc = Eigen::VectorXd::Zero(nn);
  std::vector<char> fixed(nn, 0);
  for (int i = 0; i < nn; ++i)
    if (mesh.is_boundary_node(i)) {
      fixed[i] = 1;
      bc[i] = g(mesh.node_coord(i));
    }

  DirichletScalarSystem sys;
  sys.boundary_values = bc;
  sys.rhs = load;
  // interior rhs correction: b_i -= K_ij g_j
  Eigen::VectorXd corr = K.K * bc;
  for (int i = 0; i < nn; ++i) sys.rhs[i] = fixed[i] ? bc[i] : sys.rhs[i] - corr[i];

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(K.K.nonZeros());
  for (int r = 0; r < K.K.outerSize(); ++r)
    for (SpMat::InnerIterator it(K.K, r); it; ++it) {
      if (fixed[it.row()] || fixed[it.col()]) continue;
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  for (int i = 0; i < nn; ++i)
    if (fixed[i]) trip.emplace_back(i, i, 1.0);
  sys.K.K.resize(nn, nn);
  sys.K.K.setFromTriplets(trip.begin(), trip.end());
  sys.K.symmetric = true;
  return sys;
}

StokesSystem assemble_stokes(const Mesh& mesh, const StressLaw& stress, const ScalarSampler& mu_scale,
                             const StokesLoads& loads, double stab_beta) {
  const int nn = mesh.num_nodes();
  const int nv = 2 * nn, np = nn;
  const double area = mesh.elem_area();
  const double h = mesh.h;
  const bool periodic = mesh.mode == BoundaryMode::periodic;

  std::vector<char> fixed(nv, 0);
  Eigen::VectorXd bcval = Eigen::VectorXd::Zero(nv);
  if (!periodic) {
    for (int i = 0; i < nn; ++i)
      if (mesh.is_boundary_node(i)) {
        const Vec2 g =
            loads.boundary_velocity ? loads.boundary_velocity(mesh.node_coord(i)) : Vec2::Zero();
        fixed[2 * i] = fixed[2 * i + 1] = 1;
        bcval[2 * i] = g[0];
        bcval[2 * i + 1] = g[1];
      }
  }

  std::vector<Eigen::Triplet<double>> ta, tb, tc;
  ta.reserve(static_cast<size_t>(mesh.num_elements()) * 36);
  tb.reserve(static_cast<size_t>(mesh.num_elements()) * 18);
  tc.reserve(static_cast<size_t>(mesh.num_elements()) * 9);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv + np);
  Eigen::VectorXd precond_p = Eigen::VectorXd::Zero(np);

  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mesh::Element el = mesh.element(e);
    // velocity block
    Mat2 sig[3][2];
    for (int b = 0; b < 3; ++b)
      for (int l = 0; l < 2; ++l) sig[b][l] = stress(e, basis_strain(l, el.grad[b]));
    for (int a = 0; a < 3; ++a)
      for (int k = 0; k < 2; ++k) {
        const int row = 2 * el.node[a] + k;
        const Mat2 Dak = basis_strain(k, el.grad[a]);
        for (int b = 0; b < 3; ++b)
          for (int l = 0; l < 2; ++l) {
            const int col = 2 * el.node[b] + l;
            const double v = area * (Dak.array() * sig[b][l].array()).sum();
            if (fixed[row]) continue;
            if (fixed[col]) {
              rhs[row] -= v * bcval[col];
              continue;
            }
            ta.emplace_back(row, col, v);
          }
      }
    // divergence coupling B[p_i, (b,l)] = -(|e|/3) grad(N_b)[l]
    for (int i = 0; i < 3; ++i) {
      const int prow = el.node[i];
      for (int b = 0; b < 3; ++b)
        for (int l = 0; l < 2; ++l) {
          const int col = 2 * el.node[b] + l;
          const double v = -(area / 3.0) * el.grad[b][l];
          if (fixed[col]) {
            rhs[nv + prow] -= v * bcval[col];
            continue;
          }
          tb.emplace_back(prow, col, v);
        }
    }
    // stabilization C = -(beta h^2 / mu) grad p . grad q; the local 1/mu
    // keeps the pressure leak independent of the penalization contrast
    const double mu_e = mu_scale ? mu_scale(e, el.centroid) : 1.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        tc.emplace_back(el.node[i], el.node[j],
                        -(stab_beta * h * h / mu_e) * area * el.grad[i].dot(el.grad[j]));
    for (int i = 0; i < 3; ++i) precond_p[el.node[i]] += (area / 3.0) / mu_e;

    // loads
    if (loads.body_force) {
      const Vec2 f = (*loads.body_force)(e, el.centroid);
      for (int a = 0; a < 3; ++a)
        for (int k = 0; k < 2; ++k) {
          const int row = 2 * el.node[a] + k;
          if (!fixed[row]) rhs[row] += (area / 3.0) * f[k];
        }
    }
    if (loads.extra_stress) {
      const Mat2 tau = (*loads.extra_stress)(e, el.centroid);
      for (int a = 0; a < 3; ++a)
        for (int k = 0; k < 2; ++k) {
          const int row = 2 * el.node[a] + k;
          if (!fixed[row])
            rhs[row] -= area * (tau.array() * basis_strain(k, el.grad[a]).array()).sum();
        }
    }
  }
  for (int i = 0; i < nv; ++i)
    if (fixed[i]) {
      ta.emplace_back(i, i, 1.0);
      rhs[i] = bcval[i];
    }

  StokesSystem sys;
  sys.mesh = &mesh;
  sys.op.nv = nv;
  sys.op.np = np;
  sys.op.periodic = periodic;
  sys.op.fixed_vel = fixed;
  sys.op.A.resize(nv, nv);
  sys.op.A.setFromTriplets(ta.begin(), ta.end());
  sys.op.B.resize(np, nv);
  sys.op.B.setFromTriplets(tb.begin(), tb.end());
  sys.op.C.resize(np, np);
  sys.op.C.setFromTriplets(tc.begin(), tc.end());
  sys.op.precond_p = precond_p;
  sys.op.prepare();
  sys.rhs = rhs;
  return sys;
}

StokesSystem assemble_stokes_isotropic(const Mesh& mesh, const ScalarSampler& mu,
                                       const StokesLoads& loads, double stab_beta) {
  std::vector<double> mu_e(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    mu_e[e] = mu(e, mesh.element(e).centroid);
    if (!(mu_e[e] > 0.0))
      throw InvariantError("non-positive viscosity on element " + std::to_string(e));
  }
  StressLaw law = [&mu_e](int e, const Mat2& d) { return Mat2(2.0 * mu_e[e] * d); };
  ScalarSampler scale = [&mu_e](int e, const Vec2&) { return mu_e[e]; };
  return assemble_stokes(mesh, law, scale, loads, stab_beta);
}

double divergence_l2(const VectorField& u) {
  double s = 0.0;
  const double area = u.mesh.elem_area();
  for (int e = 0; e < u.mesh.num_elements(); ++e) {
    const double d = u.divergence(e);
    s += area * d * d;
  }
  return std::sqrt(s);
}

}  // namespace homog
