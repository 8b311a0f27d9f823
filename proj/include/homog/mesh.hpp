#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "homog/geometry.hpp"

namespace homog {

enum class BoundaryMode { periodic, dirichlet };

/// Structured triangulation of the unit square: n x n grid squares, each
/// split along the (0,0)-(1,1) diagonal into two P1 triangles.
/// Periodic mode identifies opposite faces, so there are n^2 distinct nodes;
/// Dirichlet mode keeps (n+1)^2 nodes.
struct Mesh {
  int n = 0;
  BoundaryMode mode = BoundaryMode::periodic;
  double h = 0.0;

  int nodes_per_side() const { return mode == BoundaryMode::periodic ? n : n + 1; }
  int num_nodes() const { int s = nodes_per_side(); return s * s; }
  int num_elements() const { return 2 * n * n; }
  double elem_area() const { return 0.5 * h * h; }

  int node_id(int ix, int iy) const {
    const int s = nodes_per_side();
    if (mode == BoundaryMode::periodic) {
      ix %= n; iy %= n;
      if (ix < 0) ix += n;
      if (iy < 0) iy += n;
    }
    return ix + iy * s;
  }

  Vec2 node_coord(int id) const {
    const int s = nodes_per_side();
    return Vec2((id % s) * h, (id / s) * h);
  }

  bool is_boundary_node(int id) const {
    if (mode == BoundaryMode::periodic) return false;
    const int s = nodes_per_side();
    const int ix = id % s, iy = id / s;
    return ix == 0 || iy == 0 || ix == s - 1 || iy == s - 1;
  }

  struct Element {
    std::array<int, 3> node;        // global node ids
    std::array<Vec2, 3> grad;       // constant P1 basis gradients
    Vec2 centroid;
    std::array<Vec2, 3> vertex;     // geometric vertex coordinates
  };

  // Element e = 2*(ix + iy*n) + t, t in {0,1}.
  Element element(int e) const {
    const int sq = e / 2, t = e % 2;
    const int ix = sq % n, iy = sq / n;
    const double x0 = ix * h, y0 = iy * h;
    Element el;
    if (t == 0) {  // (0,0)-(h,0)-(h,h)
      el.node = {node_id(ix, iy), node_id(ix + 1, iy), node_id(ix + 1, iy + 1)};
      el.vertex = {Vec2(x0, y0), Vec2(x0 + h, y0), Vec2(x0 + h, y0 + h)};
      el.grad = {Vec2(-1.0 / h, 0.0), Vec2(1.0 / h, -1.0 / h), Vec2(0.0, 1.0 / h)};
      el.centroid = Vec2(x0 + 2.0 * h / 3.0, y0 + h / 3.0);
    } else {       // (0,0)-(h,h)-(0,h)
      el.node = {node_id(ix, iy), node_id(ix + 1, iy + 1), node_id(ix, iy + 1)};
      el.vertex = {Vec2(x0, y0), Vec2(x0 + h, y0 + h), Vec2(x0, y0 + h)};
      el.grad = {Vec2(0.0, -1.0 / h), Vec2(1.0 / h, 0.0), Vec2(-1.0 / h, 1.0 / h)};
      el.centroid = Vec2(x0 + h / 3.0, y0 + 2.0 * h / 3.0);
    }
    return el;
  }

  /// Element containing a point of [0,1)^2 (points on the far faces are
  /// clamped into the last cell in Dirichlet mode).
  int locate(const Vec2& x) const {
    int ix = static_cast<int>(std::floor(x[0] * n));
    int iy = static_cast<int>(std::floor(x[1] * n));
    ix = std::min(std::max(ix, 0), n - 1);
    iy = std::min(std::max(iy, 0), n - 1);
    const double lx = x[0] * n - ix, ly = x[1] * n - iy;
    const int t = (ly <= lx) ? 0 : 1;
    return 2 * (ix + iy * n) + t;
  }
};

inline Mesh make_mesh(int n, BoundaryMode mode) {
  Mesh m;
  m.n = n;
  m.mode = mode;
  m.h = 1.0 / n;
  return m;
}

// --- Fields -----------------------------------------------------------------

struct ScalarField {
  Mesh mesh;
  Eigen::VectorXd nodal;

  // Piecewise-constant P1 gradient on element e.
  Vec2 gradient(int e) const {
    const Mesh::Element el = mesh.element(e);
    Vec2 g = Vec2::Zero();
    for (int a = 0; a < 3; ++a) g += nodal[el.node[a]] * el.grad[a];
    return g;
  }

  double value_at(const Vec2& x) const;  // linear interpolation
};

struct VectorField {
  Mesh mesh;
  Eigen::VectorXd nodal;  // interleaved (ux, uy) per node

  Mat2 gradient(int e) const {  // (grad u)_{kl} = d u_k / d x_l
    const Mesh::Element el = mesh.element(e);
    Mat2 g = Mat2::Zero();
    for (int a = 0; a < 3; ++a) {
      const Vec2 ua(nodal[2 * el.node[a]], nodal[2 * el.node[a] + 1]);
      g += ua * el.grad[a].transpose();
    }
    return g;
  }

  Mat2 strain(int e) const {
    const Mat2 g = gradient(e);
    return 0.5 * (g + g.transpose());
  }

  double divergence(int e) const { return gradient(e).trace(); }
};

struct MatrixField {
  Mesh mesh;
  std::vector<Mat2> elem;  // one matrix per element
};

double ScalarField_value_impl(const Mesh& mesh, const Eigen::VectorXd& nodal, const Vec2& x);

inline double ScalarField::value_at(const Vec2& x) const {
  return ScalarField_value_impl(mesh, nodal, x);
}

// --- Norms ------------------------------------------------------------------

double l2_norm(const ScalarField& f);
double sup_norm(const ScalarField& f);        // max |nodal value|
double h1_seminorm(const ScalarField& f);
double l2_norm(const VectorField& f);
double sup_grad(const ScalarField& f);        // max element |grad|
double mean(const ScalarField& f);            // exact P1 cell mean

}  // namespace homog
