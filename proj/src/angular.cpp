#include "smm/angular.hpp"

#include <cmath>
#include <stdexcept>

#include "smm/lagrange.hpp"

namespace smm {

AngularQuadrature build_angular_quadrature(int n_polar, int n_azimuthal) {
  if (n_polar < 1) throw std::invalid_argument("angular quadrature: n_polar must be >= 1");
  if (n_azimuthal < 4 || n_azimuthal % 4 != 0)
    throw std::invalid_argument("angular quadrature: n_azimuthal must be a multiple of 4, >= 4");

  // Polar cosines: Gauss-Legendre on (0,1]; each node's weight is doubled to
  // account for the collapsed -z hemisphere (integrands are z-symmetric).
  const std::vector<double> mu = gauss_legendre_nodes(n_polar);
  const std::vector<double> wmu = gauss_legendre_weights(n_polar);

  const double pi = std::acos(-1.0);
  const double wphi = 2.0 * pi / n_azimuthal;

  AngularQuadrature quad;
  quad.directions.reserve(static_cast<std::size_t>(n_polar) * n_azimuthal);
  for (int i = 0; i < n_polar; ++i) {
    const double m = mu[i];
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - m * m));
    for (int k = 0; k < n_azimuthal; ++k) {
      const double phi = 2.0 * pi * (k + 0.5) / n_azimuthal;
      Direction d;
      d.x = sin_theta * std::cos(phi);
      d.y = sin_theta * std::sin(phi);
      d.z = m;
      d.w = 2.0 * wmu[i] * wphi;
      quad.directions.push_back(d);
    }
  }
  return quad;
}

namespace {

// Emits the four sign combinations of (x, y) at height z > 0, each carrying
// the doubled (z-collapsed) weight w.
void push_sign_family(AngularQuadrature& quad, double x, double y, double z, double w) {
  for (int sx : {1, -1})
    for (int sy : {1, -1}) {
      Direction d;
      d.x = sx * x;
      d.y = sy * y;
      d.z = z;
      d.w = w;
      quad.directions.push_back(d);
    }
}

}  // namespace

AngularQuadrature level_symmetric_quadrature(int order) {
  const double pi = std::acos(-1.0);
  AngularQuadrature quad;
  if (order == 2) {
    const double c = 1.0 / std::sqrt(3.0);
    push_sign_family(quad, c, c, c, pi);
    return quad;
  }
  if (order == 4) {
    // Two cosine levels a < b with 2a^2 + b^2 = 1. Equal weights make the
    // second moments exact automatically; exactness of the fourth moments
    // requires 2a^4 + b^4 = 3/5, i.e. a^2 = (5 - sqrt(10))/15.
    const double a = std::sqrt((5.0 - std::sqrt(10.0)) / 15.0);
    const double b = std::sqrt(1.0 - 2.0 * a * a);
    const double w = pi / 3.0;
    push_sign_family(quad, a, a, b, w);
    push_sign_family(quad, a, b, a, w);
    push_sign_family(quad, b, a, a, w);
    return quad;
  }
  throw std::invalid_argument("level_symmetric_quadrature: supported orders are 2 and 4");
}

}  // namespace smm
