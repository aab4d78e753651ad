#pragma once

#include <vector>

#include "smm/geom.hpp"

namespace smm {

/// 1D Gauss-Legendre rule on [0,1], exact for polynomials of degree
/// 2*npoints - 1.
struct QuadratureRule1D {
  std::vector<double> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

/// Tensor-product rule on the reference square [0,1]^2.
struct QuadratureRule2D {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

/// Smallest Gauss rule exact for 1D polynomials of the given total degree.
QuadratureRule1D make_quadrature_1d(int order);

/// Tensor product of make_quadrature_1d(order); exact for Q_{order,order}.
QuadratureRule2D make_quadrature_2d(int order);

}  // namespace smm
