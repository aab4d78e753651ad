#pragma once

#include <functional>
#include <vector>

#include "smm/transport.hpp"

namespace smm {

/// Discrete boundary constant: sum_d w_d |Omega_d . n| / (4 pi). Tends to
/// the continuum value 1/2 as the angular quadrature refines.
double discrete_eb0(const Vec2& n, const AngularQuadrature& quad);

/// Inflow partial current at a boundary point: the sum over incoming
/// ordinates (Omega.n < 0) of w (Omega.n) psi_bar(x, Omega). Non-positive
/// whenever the inflow data is non-negative. A null psi_bar means vacuum.
double inflow_current(const std::function<double(const Vec2&, const Direction&)>& psi_bar,
                      const Vec2& x, const Vec2& n, const AngularQuadrature& quad);

/// Transport-to-moment coupling fields computed from an angular flux: the
/// correction tensor T = sum_d w_d Omega_d Omega_d psi_d - (1/3) I sum_d w_d
/// psi_d held nodewise in the flux's DG space (including the out-of-plane zz
/// component, so the 3x3 trace vanishes identically for unit directions),
/// plus the boundary factor beta evaluated lazily at boundary points with
/// the same quadrature as E_b0.
class ClosureFields {
 public:
  ClosureFields(const AngularFlux& flux, const AngularQuadrature& quad);

  const FiniteElementSpace& space() const { return *space_; }
  const AngularQuadrature& quad() const { return *quad_; }

  const Vector& txx() const { return txx_; }
  const Vector& txy() const { return txy_; }
  const Vector& tyy() const { return tyy_; }
  const Vector& tzz() const { return tzz_; }

  /// Interpolated T at a reference point of element e.
  SymTensor eval_T(int e, const Vec2& xi) const;

  /// Broken divergence of the interpolated T: element-local derivatives,
  /// no face contributions.
  Vec2 eval_div_T(int e, const ElementFrame& fr, const Vec2& xi) const;

  /// Boundary factor at a boundary point given by (element, reference
  /// coordinates) and the outward unit normal:
  /// beta = sum_d w |Omega.n| psi_d(x) - E_b0(n) sum_d w psi_d(x).
  double beta(int e, const Vec2& xi, const Vec2& n) const;

 private:
  const AngularFlux* flux_;
  const AngularQuadrature* quad_;
  const FiniteElementSpace* space_;
  Vector txx_, txy_, tyy_, tzz_;
};

/// Right-hand-side data for the moment systems: angular moments of the
/// fixed source, the inflow current, and (optionally) the closure fields.
/// Empty function objects mean identically zero.
struct MomentSources {
  std::function<double(const Vec2&)> q0;                 // integral of q over directions
  std::function<Vec2(const Vec2&)> q1;                   // planar first moment of q
  std::function<double(const Vec2&, const Vec2&)> jin;   // (x, outward n) -> inflow current
  const ClosureFields* closures = nullptr;               // T and beta; null = zero
};

/// Builds MomentSources whose q0/q1/jin are quadrature sums over the
/// problem's fixed source and inflow data (the same angular quadrature used
/// for the closures, so all moment data are mutually consistent).
MomentSources moment_sources(const TransportProblem& prob, const ClosureFields* closures);

}  // namespace smm
