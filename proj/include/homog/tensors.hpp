#pragma once

#include <array>

#include "homog/geometry.hpp"

namespace homog {

/// Fourth-rank tensor T^{ij}_{mn} on R^2, stored dense.
struct Tensor4 {
  std::array<double, 16> v{};

  double& operator()(int i, int j, int m, int n) { return v[((i * 2 + j) * 2 + m) * 2 + n]; }
  double operator()(int i, int j, int m, int n) const { return v[((i * 2 + j) * 2 + m) * 2 + n]; }

  /// sigma_{mn} = T^{ij}_{mn} E_{ij}
  Mat2 contract(const Mat2& E) const {
    Mat2 s = Mat2::Zero();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int m = 0; m < 2; ++m)
          for (int n = 0; n < 2; ++n) s(m, n) += (*this)(i, j, m, n) * E(i, j);
    return s;
  }

  /// T^{ij}_{mn} zeta_i zeta_m eta_j eta_n
  double legendre_hadamard(const Vec2& zeta, const Vec2& eta) const {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int m = 0; m < 2; ++m)
          for (int n = 0; n < 2; ++n) s += (*this)(i, j, m, n) * zeta[i] * zeta[m] * eta[j] * eta[n];
    return s;
  }

  /// max defect over the index symmetries ij<->mn, i<->j, m<->n
  double symmetry_defect() const {
    double d = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int m = 0; m < 2; ++m)
          for (int n = 0; n < 2; ++n) {
            const double t = (*this)(i, j, m, n);
            d = std::max(d, std::abs(t - (*this)(m, n, i, j)));
            d = std::max(d, std::abs(t - (*this)(j, i, m, n)));
            d = std::max(d, std::abs(t - (*this)(i, j, n, m)));
          }
    return d;
  }

  /// The pure-fluid value: sym(e^i x e^j) : sym(e^m x e^n).
  static Tensor4 symmetrizer() {
    Tensor4 t;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int m = 0; m < 2; ++m)
          for (int n = 0; n < 2; ++n)
            t(i, j, m, n) = 0.5 * ((i == m && j == n ? 1.0 : 0.0) + (i == n && j == m ? 1.0 : 0.0));
    return t;
  }
};

struct EffectiveTensors {
  Mat2 A = Mat2::Identity();                  // effective permeability
  Tensor4 N = Tensor4::symmetrizer();         // effective viscosity
  std::array<std::array<Mat2, 2>, 2> B{};     // effective coupling, one matrix per (i,j)
};

}  // namespace homog
