#include "smm/quadrature.hpp"

#include <stdexcept>

#include "smm/lagrange.hpp"

namespace smm {

QuadratureRule1D make_quadrature_1d(int order) {
  if (order < 0) throw std::invalid_argument("make_quadrature_1d: order >= 0 required");
  const int n = order / 2 + 1;  // 2n-1 >= order
  return {gauss_legendre_nodes(n), gauss_legendre_weights(n)};
}

QuadratureRule2D make_quadrature_2d(int order) {
  const QuadratureRule1D r = make_quadrature_1d(order);
  QuadratureRule2D q;
  q.points.reserve(r.size() * r.size());
  q.weights.reserve(r.size() * r.size());
  for (int j = 0; j < r.size(); ++j)
    for (int i = 0; i < r.size(); ++i) {
      q.points.push_back({r.points[i], r.points[j]});
      q.weights.push_back(r.weights[i] * r.weights[j]);
    }
  return q;
}

}  // namespace smm
