#include "smm/dsa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smm/assembly.hpp"
#include "smm/closures.hpp"

namespace smm {

DsaResult dsa_reference_solve(const TransportProblem& prob, const DsaOptions& opt) {
  prob.validate();
  TransportSweeper sweeper(prob);
  const FiniteElementSpace& dg = sweeper.space();
  const Mesh& mesh = *prob.mesh;

  MomentProblem mp;
  mp.mesh = prob.mesh;
  mp.degree = prob.degree;
  mp.sigma_t = prob.sigma_t;
  mp.sigma_s = prob.sigma_s;
  mp.quad = prob.quad;
  mp.penalty_scale = opt.penalty_scale;
  MomentOptions mo;
  mo.kind = MethodKind::IP;
  mo.solver = opt.solver;
  mo.tol = opt.inner_tol;
  mo.max_iter = opt.inner_max_iter;
  auto correction = make_moment_system(mp, mo);

  // The correction operator's scalar space and the sweeper's space are both
  // nodal discontinuous spaces of the same degree on the same mesh, built by
  // the same element-major rule, so their coefficient vectors coincide dof
  // for dof; residual integrals are assembled against either basis.
  const FiniteElementSpace& ipspace = correction->scalar_space();
  if (ipspace.n_dofs() != dg.n_dofs())
    throw std::logic_error("correction space does not match the transport space");

  const int order = 2 * prob.degree + 2 * mesh.geom_degree();
  const QuadratureRule2D vol_rule = make_quadrature_2d(order);
  const ScalarTable tab = tabulate_scalar(dg, vol_rule.points, /*with_grad=*/false);
  const VolumeGeometry geom = cache_volume_geometry(mesh, vol_rule);
  const int nb = dg.n_local_dofs();

  DsaResult res;
  res.phi.assign(dg.n_dofs(), 0.0);
  GridFunction phi_gf(dg);
  MomentSolution warm;

  for (int l = 0; l < opt.max_iter; ++l) {
    phi_gf.coeff = res.phi;
    AngularFlux flux = sweeper.sweep(phi_gf, nullptr, /*fixup=*/false);
    res.iterations = l + 1;
    const Moments m = angular_moments(flux, prob.quad);

    // Correction right-hand side: (sigma_s (phi_half - phi_old), u).
    Vector rhs(dg.n_dofs(), 0.0);
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const auto& dofs = dg.element_dofs(e);
      const double ss = prob.sigma_s[e];
      if (ss == 0.0) continue;
      for (int q = 0; q < geom.nq; ++q) {
        const ElementFrame2& fr = geom.at(e, q);
        double diff = 0.0;
        for (int j = 0; j < nb; ++j)
          diff += tab.v(q, j) * (m.phi[dofs[j]] - res.phi[dofs[j]]);
        const double w = vol_rule.weights[q] * fr.J * ss * diff;
        for (int i = 0; i < nb; ++i) rhs[dofs[i]] += w * tab.v(q, i);
      }
    }

    MomentSolution delta = correction->solve(rhs, &warm);
    warm = delta;

    double change = 0.0;
    for (int i = 0; i < dg.n_dofs(); ++i) {
      const double next = m.phi[i] + delta.varphi[i];
      change = std::max(change, std::abs(next - res.phi[i]));
      res.phi[i] = next;
    }
    res.final_delta = change;
    if (change < opt.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace smm
