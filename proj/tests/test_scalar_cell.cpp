#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "homog/scalar_cell.hpp"

using namespace homog;

namespace {

CellGeometry disk_cell(int n = 64, double ain = 5.0) {
  InclusionSpec inc;
  inc.kind = InclusionKind::disk;
  inc.center = Vec2(0.5, 0.5);
  inc.radius = 0.25;
  CoefficientField cf;
  cf.a_in = ain * Mat2::Identity();
  cf.a_out = Mat2::Identity();
  return build_unit_cell(inc, cf, n);
}

CellGeometry uniform_cell(double c, int n = 32) {
  InclusionSpec inc;
  inc.kind = InclusionKind::none;
  CoefficientField cf;
  cf.a_in = c * Mat2::Identity();
  cf.a_out = c * Mat2::Identity();
  return build_unit_cell(inc, cf, n);
}

CellGeometry laminate_cell(double alpha, double beta, int n) {
  InclusionSpec inc;
  inc.kind = InclusionKind::laminate;
  CoefficientField cf;
  cf.a_in = alpha * Mat2::Identity();   // layer y1 < 1/2
  cf.a_out = beta * Mat2::Identity();   // layer y1 >= 1/2
  return build_unit_cell(inc, cf, n);
}

}  // namespace

TEST_CASE("constant coefficient: correctors vanish and A collapses") {
  const CellGeometry cell = uniform_cell(3.0);
  const ScalarCellSolution sol = solve_correctors(cell);
  for (int i = 0; i < 2; ++i) {
    CHECK(sup_norm(sol.omega[i]) <= 1e-9);
    CHECK(std::abs(mean(sol.omega[i])) <= 1e-12);
  }
  const Mat2 A = effective_permeability(cell, sol);
  CHECK((A - 3.0 * Mat2::Identity()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("laminate matches the harmonic/arithmetic closed form") {
  const double alpha = 1.0, beta = 4.0;
  const CellGeometry cell = laminate_cell(alpha, beta, 128);
  const ScalarCellSolution sol = solve_correctors(cell);
  const Mat2 A = effective_permeability(cell, sol);
  const double harm = 2.0 * alpha * beta / (alpha + beta);  // 1.6
  const double arit = 0.5 * (alpha + beta);                 // 2.5
  CHECK(std::abs(A(0, 0) - harm) <= 0.01 * harm);
  CHECK(std::abs(A(1, 1) - arit) <= 0.01 * arit);
  CHECK(std::abs(A(0, 1)) <= 1e-8);

  // omega^1 is piecewise linear in y1 with slopes harm/alpha - 1 and
  // harm/beta - 1 = +0.6 / -0.6; omega^2 = 0
  double max_dev = 0.0;
  for (int e = 0; e < sol.mesh.num_elements(); ++e) {
    const double y1 = sol.mesh.element(e).centroid[0];
    const double slope = (y1 < 0.5) ? harm / alpha - 1.0 : harm / beta - 1.0;
    max_dev = std::max(max_dev, std::abs(sol.omega[0].gradient(e)[0] - slope));
  }
  CHECK(max_dev <= 1e-6);
  CHECK(sup_norm(sol.omega[1]) <= 1e-9);
}

TEST_CASE("disk corrector has the mirror antisymmetry of the geometry") {
  // a(y) is even about y1 = 1/2 and the e^1 load is odd, so omega^1(y1,y2) =
  // -omega^1(1-y1,y2) in the continuum. The structured diagonal breaks the
  // mirror at the discrete level, so the defect is a discretization artifact:
  // small and decaying under refinement.
  auto defect = [](int n) {
    const ScalarCellSolution sol = solve_correctors(disk_cell(n));
    const Mesh& mesh = sol.mesh;
    double dev = 0.0;
    for (int iy = 0; iy < mesh.n; ++iy)
      for (int ix = 0; ix < mesh.n; ++ix) {
        const double v = sol.omega[0].nodal[mesh.node_id(ix, iy)];
        const double vm = sol.omega[0].nodal[mesh.node_id(mesh.n - ix, iy)];
        dev = std::max(dev, std::abs(v + vm));
      }
    return dev;
  };
  const double d64 = defect(64), d128 = defect(128);
  CHECK(d64 <= 0.02);
  CHECK(d128 <= 0.75 * d64);
}

TEST_CASE("disk effective tensor is isotropic up to discretization") {
  const CellGeometry cell = disk_cell(64);
  const ScalarCellSolution sol = solve_correctors(cell);
  const Mat2 A = effective_permeability(cell, sol);
  // A11 = A22 holds exactly (diagonal-swap symmetry of mesh and geometry)
  CHECK(std::abs(A(0, 0) - A(1, 1)) <= 1e-9);
  // the off-diagonal entry is a discretization artifact of the mesh diagonal:
  // small at n=64 and decaying under refinement
  CHECK(std::abs(A(0, 1)) <= 5e-3);
  const ScalarCellSolution sol2 = solve_correctors(disk_cell(128));
  const Mat2 A2 = effective_permeability(disk_cell(128), sol2);
  CHECK(std::abs(A2(0, 1)) <= 0.75 * std::abs(A(0, 1)));

  // gamma = A11 in (1, 5): strict Voigt-Reuss interior for a nontrivial cell
  CHECK(A(0, 0) > 1.0);
  CHECK(A(0, 0) < 5.0);
}

TEST_CASE("energy and flux forms of A agree") {
  const CellGeometry cell = disk_cell(64);
  const ScalarCellSolution sol = solve_correctors(cell);
  const Mat2 A = effective_permeability(cell, sol);
  const Mat2 Af = effective_permeability_flux_form(cell, sol);
  CHECK((A - Af).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("tau_ref trivial values on the uniform cell") {
  const double c = 2.0;
  const CellGeometry cell = uniform_cell(c);
  const ScalarCellSolution sol = solve_correctors(cell);
  const MatrixField t11 = maxwell_cell_stress(cell, sol, 0, 0);
  const MatrixField t12 = maxwell_cell_stress(cell, sol, 0, 1);
  Mat2 e11, e12;
  e11 << 0.5 * c, 0.0, 0.0, -0.5 * c;            // c (e1 x e1 - 1/2 I)
  e12 << 0.0, c, 0.0, 0.0;                       // c e1 x e2
  for (int e = 0; e < sol.mesh.num_elements(); ++e) {
    CHECK((t11.elem[e] - e11).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((t12.elem[e] - e12).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("tau_ref trace identity") {
  // tr tau^{ij} = a g_i . g_j - 1/2 (a g_i . g_j) tr I = 0 for the scalar
  // coefficient; for matrix a the trace of the deviatoric construction still
  // vanishes identically
  const CellGeometry cell = disk_cell(64);
  const ScalarCellSolution sol = solve_correctors(cell);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const MatrixField t = maxwell_cell_stress(cell, sol, i, j);
      double worst = 0.0;
      for (const Mat2& m : t.elem) worst = std::max(worst, std::abs(m.trace()));
      CHECK(worst <= 1e-10 * (i == j ? 1.0 : 1.0) * 10.0);
    }
}

TEST_CASE("corrector sup norms stay bounded under refinement") {
  const ScalarCellSolution s64 = solve_correctors(disk_cell(64));
  const ScalarCellSolution s128 = solve_correctors(disk_cell(128));
  for (int i = 0; i < 2; ++i) {
    CHECK(s128.sup_omega[i] <= 1.1 * s64.sup_omega[i] + 1e-12);
    CHECK(s64.sup_omega[i] == doctest::Approx(sup_norm(s64.omega[i])));
  }
}
