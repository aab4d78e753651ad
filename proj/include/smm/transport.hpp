#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "smm/angular.hpp"
#include "smm/assembly.hpp"
#include "smm/fespace.hpp"
#include "smm/mesh.hpp"
#include "smm/quadrature.hpp"
#include "smm/sparse.hpp"

namespace smm {

/// Discrete-ordinates transport problem: Omega.grad(psi) + sigma_t psi =
/// (sigma_s/4pi) phi + q on a 2D mesh, with inflow data psi_bar on the
/// domain boundary. Cross sections are piecewise constant per element.
struct TransportProblem {
  const Mesh* mesh = nullptr;
  int degree = 1;
  AngularQuadrature quad;
  std::vector<double> sigma_t;  // per element
  std::vector<double> sigma_s;  // per element
  std::function<double(const Vec2&, const Direction&)> source;  // q; null = 0
  std::function<double(const Vec2&, const Direction&)> inflow;  // psi_bar; null = vacuum

  double sigma_a(int e) const { return sigma_t[e] - sigma_s[e]; }
  /// Throws unless 0 <= sigma_s <= sigma_t on every element and sizes match.
  void validate() const;
};

/// Per-direction DG angular flux; all directions share one scalar space.
struct AngularFlux {
  const FiniteElementSpace* space = nullptr;
  std::vector<Vector> psi;  // psi[d] = coefficients for direction d
  int n_directions() const { return static_cast<int>(psi.size()); }
};

/// Nodewise angular moments of an AngularFlux (coefficients in its space):
/// scalar flux, planar current, and the full second-moment tensor including
/// the out-of-plane zz component (so that the 3x3 trace identities hold).
struct Moments {
  Vector phi;
  Vector jx, jy;
  Vector pxx, pxy, pyy, pzz;
};
Moments angular_moments(const AngularFlux& flux, const AngularQuadrature& quad);

/// Element solve order for one direction plus the faces that must be lagged:
/// faces where Omega.n changes sign along the face and faces on dependency
/// cycles of the element graph.
struct SweepOrder {
  std::vector<int> order;       // element permutation
  std::vector<char> reentrant;  // per face, 1 = lagged upwinding
};
/// The dependency graph uses the face-averaged sign of Omega.n; `rule`
/// controls the sampling points (default: order 2*geom_degree + 2).
SweepOrder sweep_order(const Mesh& mesh, const Direction& dir,
                       const QuadratureRule1D* rule = nullptr);

/// Zeros negative nodal values and rescales the positive ones so the
/// weighted sum (the element integral) is preserved; if that sum is
/// non-positive the element is zeroed entirely.
void zero_and_scale_fixup(const std::vector<double>& nodal_weights, double* values, int n);

/// Element-by-element upwind DG transport sweeps with cached per-element
/// matrices and face tables. Construction precomputes everything that does
/// not depend on the scattering source.
class TransportSweeper {
 public:
  explicit TransportSweeper(const TransportProblem& prob);

  const TransportProblem& problem() const { return *prob_; }
  const FiniteElementSpace& space() const { return *space_; }
  const QuadratureRule2D& volume_rule() const { return vol_rule_; }
  const SweepOrder& direction_order(int d) const { return orders_[d]; }

  /// Mixed-space scattering moments: entries (u_i, (sigma_s/4pi) varphi) for
  /// u_i in the sweep's DG space and varphi in any scalar space on the mesh.
  Vector scattering_moments(const GridFunction& varphi) const;

  /// One full sweep over all directions. `scattering` is the vector returned
  /// by scattering_moments (empty = no scattering source); psi_prev supplies
  /// lagged values on reentrant faces (null = zero).
  AngularFlux sweep(const Vector& scattering, const AngularFlux* psi_prev, bool fixup) const;
  AngularFlux sweep(const GridFunction& varphi, const AngularFlux* psi_prev, bool fixup) const;

  /// Integral nodal weights of one element (row sums of its mass matrix);
  /// the weights used by the fixup.
  const std::vector<double>& element_nodal_weights(int e) const { return nodal_w_[e]; }

  /// Relative residual of the global particle balance
  /// boundary_leakage + absorption - scattering_gain - fixed_source = 0,
  /// evaluated with the discrete upwind boundary fluxes. `varphi` is the
  /// scalar flux that fed the scattering source (null = the flux's own phi).
  double balance_residual(const AngularFlux& flux, const GridFunction* varphi = nullptr) const;

 private:
  void local_system(int d, int e, const Vector& scattering, const AngularFlux& current,
                    const AngularFlux* psi_prev, std::vector<double>& a,
                    std::vector<double>& rhs) const;

  const TransportProblem* prob_;
  std::unique_ptr<FiniteElementSpace> space_;
  QuadratureRule2D vol_rule_;
  QuadratureRule1D face_rule_;
  ScalarTable vol_tab_;
  ScalarFaceTables face_tab_;
  VolumeGeometry vol_geom_;
  FaceGeometry face_geom_;
  int nb_ = 0;
  std::vector<std::vector<double>> mass_, gx_, gy_;  // per element, row-major test x trial
  std::vector<std::vector<double>> nodal_w_;
  std::vector<SweepOrder> orders_;
};

}  // namespace smm
