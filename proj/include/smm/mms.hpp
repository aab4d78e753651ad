#pragma once

#include "smm/angular.hpp"
#include "smm/geom.hpp"

namespace smm {

/// Smooth manufactured radiation field on [0,1]^2 with quadratically
/// anisotropic angular dependence,
///   psi = (1/4pi) [ alpha(x) + Omega . beta(x) + Omega Omega : Theta(x) ],
/// together with the matching transport source. All fields are global closed
/// forms, so they remain exact on distorted meshes (and slightly outside the
/// unit square). The defaults make psi strictly positive.
struct ManufacturedField {
  double sigma_t = 1.0;
  double sigma_s = 0.5;
  double offset = 1.25;  // added to alpha to keep psi > 0
  double omega = 0.05;   // phase shift of the first-moment sinusoid
  double zeta = 0.1;     // phase shift of the second-moment sinusoid

  double alpha(const Vec2& x) const;
  /// Both components of the vector field equal the same sinusoid b(x).
  double beta_component(const Vec2& x) const;
  /// Planar symmetric Theta: entries (1,1), (1,2) = (2,1), and (2,2).
  double theta11(const Vec2& x) const;
  double theta12(const Vec2& x) const;
  double theta22(const Vec2& x) const;

  double psi(const Vec2& x, const Direction& om) const;
  double phi(const Vec2& x) const;      // alpha + tr(Theta)/3
  Vec2 current(const Vec2& x) const;    // beta/3

  /// Reference pressure tensor of the manufactured solution: diagonal
  /// alpha/3 + (3 Theta_11 + Theta_22)/15 (and the transpose pairing),
  /// off-diagonal Theta_12/15, out-of-plane zz = alpha/3 + tr(Theta)/15;
  /// the 3x3 trace equals phi.  Note the off-diagonal is a reference value,
  /// not the angular integral of psi (which carries 2/15 Theta_12), so
  /// closure checks compare against direct angular quadrature of psi
  /// rather than this tensor's off-diagonal.
  SymTensor pressure(const Vec2& x) const;

  /// Transport source q = Omega.grad psi + sigma_t psi - (sigma_s/4pi) phi.
  double source(const Vec2& x, const Direction& om) const;
};

}  // namespace smm
