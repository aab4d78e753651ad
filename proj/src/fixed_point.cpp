#include "smm/fixed_point.hpp"

#include <algorithm>
#include <chrono>
#include <utility>

#include "smm/closures.hpp"

namespace smm {

SmmSolver::SmmSolver(const TransportProblem& prob, const SmmOptions& opt)
    : prob_(&prob), opt_(opt), sweeper_(prob) {
  MomentProblem mp;
  mp.mesh = prob.mesh;
  mp.degree = prob.degree;
  mp.sigma_t = prob.sigma_t;
  mp.sigma_s = prob.sigma_s;
  mp.quad = prob.quad;
  mp.penalty_scale = opt.penalty_scale;
  MomentOptions mo;
  mo.kind = opt.method;
  mo.solver = opt.solver;
  mo.tol = opt.inner_tol;
  mo.max_iter = opt.inner_max_iter;
  mo.rt_triangular_precond = opt.rt_triangular_precond;
  system_ = make_moment_system(mp, mo);
}

Vector SmmSolver::apply_map(const Vector& x, SmmResult& scratch) {
  using clock = std::chrono::steady_clock;
  const auto elapsed = [](clock::time_point t0) {
    return std::chrono::duration<double>(clock::now() - t0).count();
  };
  const int n_phi = system_->n_scalar();
  const int n_cur = system_->n_current();

  // Scattering source from the moment scalar flux.
  GridFunction varphi(system_->scalar_space());
  std::copy(x.begin(), x.begin() + n_phi, varphi.coeff.begin());
  const Vector scattering = sweeper_.scattering_moments(varphi);

  // Transport sweep; reentrant faces upwind from the previous sweep.
  auto t0 = clock::now();
  AngularFlux flux = sweeper_.sweep(scattering, psi_prev_.get(), opt_.fixup);
  scratch.seconds.sweep += elapsed(t0);

  // Closure fields and moment right-hand side from this sweep.
  t0 = clock::now();
  ClosureFields closures(flux, prob_->quad);
  scratch.seconds.closures += elapsed(t0);
  MomentSources src = moment_sources(*prob_, &closures);
  t0 = clock::now();
  const Vector rhs = system_->assemble_rhs(src);
  scratch.seconds.rhs += elapsed(t0);

  // Moment solve, warm started from the previous outer iteration.
  t0 = clock::now();
  MomentSolution sol = system_->solve(rhs, &warm_);
  scratch.seconds.solve += elapsed(t0);
  scratch.inner_reports.push_back(sol.report);
  scratch.total_inner_iterations += sol.report.iterations;

  psi_prev_ = std::make_unique<AngularFlux>(std::move(flux));
  warm_ = sol;

  Vector out(n_phi + n_cur);
  std::copy(sol.varphi.begin(), sol.varphi.end(), out.begin());
  if (n_cur > 0) std::copy(sol.current.begin(), sol.current.end(), out.begin() + n_phi);
  return out;
}

SmmResult SmmSolver::solve() {
  SmmResult res;
  psi_prev_.reset();
  warm_ = MomentSolution{};

  FixedPointOptions fp;
  fp.tol = opt_.tol;
  fp.max_iter = opt_.max_outer;
  fp.anderson_space = opt_.anderson_space;

  const Vector x0(system_->n_unknowns(), 0.0);
  FixedPointResult fr = fixed_point_solve(
      [this, &res](const Vector& x) { return apply_map(x, res); }, x0, fp);

  const int n_phi = system_->n_scalar();
  res.varphi.assign(fr.x.begin(), fr.x.begin() + n_phi);
  res.current.assign(fr.x.begin() + n_phi, fr.x.end());
  res.outer_iterations = fr.iterations;
  res.converged = fr.converged;
  res.final_delta = fr.final_delta;
  res.deltas = std::move(fr.deltas);
  if (psi_prev_) res.flux = *psi_prev_;
  return res;
}

SmmResult solve_smm(const TransportProblem& prob, const SmmOptions& opt) {
  SmmSolver solver(prob, opt);
  return solver.solve();
}

}  // namespace smm
