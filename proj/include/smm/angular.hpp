#pragma once

#include <vector>

#include "smm/geom.hpp"

namespace smm {

/// One discrete ordinate: a unit direction (3 components; the z-symmetric
/// partner is collapsed into the weight) and its quadrature weight in
/// steradians.
struct Direction {
  double x = 0.0, y = 0.0, z = 0.0;
  double w = 0.0;
  Vec2 xy() const { return {x, y}; }
  double dot_n(const Vec2& n) const { return x * n.x + y * n.y; }
};

/// Discrete-ordinates quadrature on the unit sphere. Invariants (verified in
/// tests): sum w = 4*pi, zero odd planar moments, second moments equal to
/// (4*pi/3) I for polar counts >= 2.
struct AngularQuadrature {
  std::vector<Direction> directions;
  int size() const { return static_cast<int>(directions.size()); }
  const Direction& operator[](int d) const { return directions[d]; }
};

/// Product rule: Gauss-Legendre in the polar cosine on (0,1] with weights
/// doubled for z-symmetry, times n_azimuthal equally weighted azimuths
/// phi_k = 2*pi*(k+1/2)/n_azimuthal. Requires n_polar >= 1 and n_azimuthal a
/// positive multiple of 4.
AngularQuadrature build_angular_quadrature(int n_polar, int n_azimuthal);

/// Level-symmetric sets (equal weights, directions invariant under axis
/// permutations and sign flips). order 2 gives 4 directions; order 4 gives 12
/// directions whose single free cosine is fixed in closed form by requiring
/// fourth-degree even moments to integrate exactly (second-degree moments are
/// exact by symmetry alone). Only orders 2 and 4 are available.
AngularQuadrature level_symmetric_quadrature(int order);

}  // namespace smm
