#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace homog {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Inclusion shapes supported on the unit cell Y = (0,1)^2.
/// `none` gives a pure-fluid cell (Y_s empty); `laminate` is the layered
/// medium split at y1 = 0.5 used by the 1D closed-form oracles.
enum class InclusionKind { none, disk, ellipse, smoothed_square, laminate };

struct InclusionSpec {
  InclusionKind kind = InclusionKind::disk;
  Vec2 center{0.5, 0.5};
  double radius = 0.25;      // disk radius / smoothed-square corner radius
  Vec2 semi_axes{0.25, 0.15};  // ellipse
  double half_width = 0.25;    // smoothed-square half width (outer)

  // Signed membership test: true if y (taken in [0,1)^2) lies in Y_s.
  bool contains(const Vec2& y) const;

  // Largest distance from center to the inclusion boundary, used to check
  // that the closure stays strictly inside the open cell.
  double outer_extent() const;

  void validate() const;
};

struct CoefficientField {
  Mat2 a_in = Mat2::Identity();
  Mat2 a_out = Mat2::Identity();

  void validate() const;  // symmetry + ellipticity (A2, A3)
  double lambda_min() const;
  double lambda_max() const;
};

/// Optional smooth per-subdomain modulation of the coefficient; defaults to
/// the piecewise-constant field. Must itself be Y-periodic in y.
using CoeffModulation = std::function<double(const Vec2& y, bool inside)>;

struct CellGeometry {
  int dim = 2;
  InclusionSpec inclusion;
  CoefficientField coeff;
  int resolution = 64;  // cell meshed resolution x resolution
  CoeffModulation modulation;  // empty -> constant 1

  // Coefficient at an arbitrary point of R^2, exactly Y-periodic.
  Mat2 coefficient_at(const Vec2& y) const;
  bool in_solid(const Vec2& y) const;

  // Volume fraction of Y_s measured with the element-centroid rule at the
  // stored resolution.
  double solid_fraction() const;

  std::string signature() const;  // stable content hash key component
};

struct MacroGeometry {
  CellGeometry cell;
  int m = 4;  // epsilon = 1/m
  int resolution_per_cell = 16;

  double epsilon() const { return 1.0 / m; }
  int nodes_per_side() const { return m * resolution_per_cell; }

  Mat2 coefficient_at(const Vec2& x) const {
    return cell.coefficient_at(Vec2(x * static_cast<double>(m)));
  }
  bool in_solid(const Vec2& x) const {
    return cell.in_solid(Vec2(x * static_cast<double>(m)));
  }
};

CellGeometry build_unit_cell(const InclusionSpec& inc, const CoefficientField& coeff,
                             int resolution);

// Memory budget guard: rejects macro meshes beyond `max_nodes_per_side`
// (default 4096, ~16.8M nodes in 2D).
MacroGeometry build_macro_domain(const CellGeometry& cell, int m, int resolution_per_cell,
                                 int max_nodes_per_side = 4096);

}  // namespace homog
