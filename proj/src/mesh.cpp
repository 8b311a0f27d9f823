#include "homog/mesh.hpp"

namespace homog {

double ScalarField_value_impl(const Mesh& mesh, const Eigen::VectorXd& nodal, const Vec2& x) {
  const int e = mesh.locate(x);
  const Mesh::Element el = mesh.element(e);
  // Barycentric interpolation on the located triangle.
  const Vec2 v0 = el.vertex[0], v1 = el.vertex[1], v2 = el.vertex[2];
  const Mat2 T = (Mat2() << v1[0] - v0[0], v2[0] - v0[0], v1[1] - v0[1], v2[1] - v0[1]).finished();
  const Vec2 lam12 = T.inverse() * (x - v0);
  const double l0 = 1.0 - lam12[0] - lam12[1];
  return l0 * nodal[el.node[0]] + lam12[0] * nodal[el.node[1]] + lam12[1] * nodal[el.node[2]];
}

double l2_norm(const ScalarField& f) {
  // Exact for P1: |e|/3 * sum of edge-midpoint values squared.
  double s = 0.0;
  const double w = f.mesh.elem_area() / 3.0;
  for (int e = 0; e < f.mesh.num_elements(); ++e) {
    const Mesh::Element el = f.mesh.element(e);
    const double a = f.nodal[el.node[0]], b = f.nodal[el.node[1]], c = f.nodal[el.node[2]];
    const double m01 = 0.5 * (a + b), m12 = 0.5 * (b + c), m02 = 0.5 * (a + c);
    s += w * (m01 * m01 + m12 * m12 + m02 * m02);
  }
  return std::sqrt(s);
}

double sup_norm(const ScalarField& f) { return f.nodal.cwiseAbs().maxCoeff(); }

double h1_seminorm(const ScalarField& f) {
  double s = 0.0;
  const double area = f.mesh.elem_area();
  for (int e = 0; e < f.mesh.num_elements(); ++e) s += area * f.gradient(e).squaredNorm();
  return std::sqrt(s);
}

double l2_norm(const VectorField& f) {
  double s = 0.0;
  const double w = f.mesh.elem_area() / 3.0;
  for (int e = 0; e < f.mesh.num_elements(); ++e) {
    const Mesh::Element el = f.mesh.element(e);
    for (int k = 0; k < 2; ++k) {
      const double a = f.nodal[2 * el.node[0] + k], b = f.nodal[2 * el.node[1] + k],
                   c = f.nodal[2 * el.node[2] + k];
      const double m01 = 0.5 * (a + b), m12 = 0.5 * (b + c), m02 = 0.5 * (a + c);
      s += w * (m01 * m01 + m12 * m12 + m02 * m02);
    }
  }
  return std::sqrt(s);
}

double sup_grad(const ScalarField& f) {
  double s = 0.0;
  for (int e = 0; e < f.mesh.num_elements(); ++e) s = std::max(s, f.gradient(e).norm());
  return s;
}

double mean(const ScalarField& f) {
  double s = 0.0;
  const double w = f.mesh.elem_area() / 3.0;
  for (int e = 0; e < f.mesh.num_elements(); ++e) {
    const Mesh::Element el = f.mesh.element(e);
    s += w * (f.nodal[el.node[0]] + f.nodal[el.node[1]] + f.nodal[el.node[2]]);
  }
  return s;  // |Omega| = 1
}

}  // namespace homog
