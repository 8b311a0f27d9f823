#include "homog/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <cstdio>

namespace homog {

namespace {

Vec2 frac01(const Vec2& y) {
  Vec2 r;
  for (int k = 0; k < 2; ++k) {
    double f = y[k] - std::floor(y[k]);
    if (f >= 1.0) f -= 1.0;  // guard against roundoff at integers
    r[k] = f;
  }
  return r;
}

}  // namespace

bool InclusionSpec::contains(const Vec2& yraw) const {
  const Vec2 y = frac01(yraw);
  const Vec2 d = y - center;
  switch (kind) {
    case InclusionKind::none:
      return false;
    case InclusionKind::disk:
      return d.squaredNorm() <= radius * radius;
    case InclusionKind::ellipse: {
      const double u = d[0] / semi_axes[0];
      const double v = d[1] / semi_axes[1];
      return u * u + v * v <= 1.0;
    }
    case InclusionKind::smoothed_square: {
      const double s = half_width - radius;  // inner square half width
      const double qx = std::max(std::abs(d[0]) - s, 0.0);
      const double qy = std::max(std::abs(d[1]) - s, 0.0);
      return qx * qx + qy * qy <= radius * radius;
    }
    case InclusionKind::laminate:
      return y[0] < 0.5;
  }
  return false;
}

double InclusionSpec::outer_extent() const {
  switch (kind) {
    case InclusionKind::none:
      return 0.0;
    case InclusionKind::disk:
      return radius;
    case InclusionKind::ellipse:
      return std::max(semi_axes[0], semi_axes[1]);
    case InclusionKind::smoothed_square:
      return half_width * std::sqrt(2.0);
    case InclusionKind::laminate:
      return 0.0;  // periodic-compatible flat interfaces
  }
  return 0.0;
}

void InclusionSpec::validate() const {
  if (kind == InclusionKind::none || kind == InclusionKind::laminate) return;
  if (kind == InclusionKind::smoothed_square) {
    if (radius <= 0.0 || radius >= half_width)
      throw ConfigError("smoothed-square needs 0 < corner radius < half_width");
  }
  if (kind == InclusionKind::disk && radius <= 0.0)
    throw ConfigError("disk radius must be positive");
  if (kind == InclusionKind::ellipse && (semi_axes[0] <= 0.0 || semi_axes[1] <= 0.0))
    throw ConfigError("ellipse semi-axes must be positive");
  const double ext = outer_extent();
  for (int k = 0; k < 2; ++k) {
    const double gap = std::min(center[k], 1.0 - center[k]);
    if (!(ext < gap))
      throw ConfigError("inclusion touches the cell boundary (dist(Gamma, dY) must be > 0)");
  }
}

void CoefficientField::validate() const {
  for (const Mat2* a : {&a_in, &a_out}) {
    if ((*a - a->transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a->cwiseAbs().maxCoeff()))
      throw ConfigError("coefficient matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat2> es(*a);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw ConfigError("coefficient matrix must be elliptic (eigenvalues > 0)");
  }
}

double CoefficientField::lambda_min() const {
  Eigen::SelfAdjointEigenSolver<Mat2> ei(a_in), eo(a_out);
  return std::min(ei.eigenvalues().minCoeff(), eo.eigenvalues().minCoeff());
}

double CoefficientField::lambda_max() const {
  Eigen::SelfAdjointEigenSolver<Mat2> ei(a_in), eo(a_out);
  return std::max(ei.eigenvalues().maxCoeff(), eo.eigenvalues().maxCoeff());
}

bool CellGeometry::in_solid(const Vec2& y) const { return inclusion.contains(y); }

Mat2 CellGeometry::coefficient_at(const Vec2& y) const {
  const bool inside = inclusion.contains(y);
  const Mat2& a = inside ? coeff.a_in : coeff.a_out;
  if (!modulation) return a;
  return modulation(frac01(y), inside) * a;
}

double CellGeometry::solid_fraction() const {
  const int n = resolution;
  const double h = 1.0 / n;
  long hits = 0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      // centroids of the two triangles of the (ix,iy) square
      const Vec2 c0(ix * h + 2.0 * h / 3.0, iy * h + h / 3.0);
      const Vec2 c1(ix * h + h / 3.0, iy * h + 2.0 * h / 3.0);
      hits += in_solid(c0) ? 1 : 0;
      hits += in_solid(c1) ? 1 : 0;
    }
  return static_cast<double>(hits) / (2.0 * n * n);
}

std::string CellGeometry::signature() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "kind=%d;c=%.17g,%.17g;r=%.17g;sa=%.17g,%.17g;hw=%.17g;"
                "ain=%.17g,%.17g,%.17g,%.17g;aout=%.17g,%.17g,%.17g,%.17g;n=%d",
                static_cast<int>(inclusion.kind), inclusion.center[0], inclusion.center[1],
                inclusion.radius, inclusion.semi_axes[0], inclusion.semi_axes[1],
                inclusion.half_width, coeff.a_in(0, 0), coeff.a_in(0, 1), coeff.a_in(1, 0),
                coeff.a_in(1, 1), coeff.a_out(0, 0), coeff.a_out(0, 1), coeff.a_out(1, 0),
                coeff.a_out(1, 1), resolution);
  return buf;
}

CellGeometry build_unit_cell(const InclusionSpec& inc, const CoefficientField& coeff,
                             int resolution) {
  if (resolution < 8) throw ConfigError("cell resolution must be >= 8");
  inc.validate();
  coeff.validate();
  CellGeometry g;
  g.inclusion = inc;
  g.coeff = coeff;
  g.resolution = resolution;
  return g;
}

MacroGeometry build_macro_domain(const CellGeometry& cell, int m, int resolution_per_cell,
                                 int max_nodes_per_side) {
  if (m < 2) throw ConfigError("macro m must be >= 2 (epsilon = 1/m)");
  if (resolution_per_cell < 8)
    throw ConfigError("macro resolution_per_cell must be >= 8 to resolve the microstructure");
  if (static_cast<long>(m) * resolution_per_cell > max_nodes_per_side)
    throw ConfigError("macro mesh exceeds the configured memory budget");
  MacroGeometry mg;
  mg.cell = cell;
  mg.m = m;
  mg.resolution_per_cell = resolution_per_cell;
  return mg;
}

}  // namespace homog
