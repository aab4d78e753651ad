#pragma once

#include <memory>
#include <vector>

#include "smm/anderson.hpp"
#include "smm/moment_system.hpp"
#include "smm/transport.hpp"

namespace smm {

struct SmmOptions {
  MethodKind method = MethodKind::IP;
  MomentSolverKind solver = MomentSolverKind::Krylov;
  double inner_tol = 1e-8;
  int inner_max_iter = 5000;
  double penalty_scale = 1.0;
  bool rt_triangular_precond = false;

  double tol = 1e-6;  // outer: absolute max-norm of the stacked update
  int max_outer = 200;
  int anderson_space = 0;  // 0 = plain fixed-point iteration
  bool fixup = false;      // transport negativity treatment
};

/// Wall time spent in each phase of the coupled iteration, accumulated over
/// all outer iterations (reporting only; nothing asserts on timings).
struct SmmTimings {
  double sweep = 0.0;
  double closures = 0.0;
  double rhs = 0.0;
  double solve = 0.0;
};

struct SmmResult {
  Vector varphi;   // scalar flux in the moment method's scalar space
  Vector current;  // moment current (first-order methods; else empty)
  AngularFlux flux;  // final transport sweep
  int outer_iterations = 0;
  bool converged = false;
  double final_delta = 0.0;
  std::vector<double> deltas;              // outer update norms per iteration
  std::vector<SolveReport> inner_reports;  // moment solver report per outer
  int total_inner_iterations = 0;
  SmmTimings seconds;
};

/// Couples the transport sweep to a moment discretization through the
/// additive closures and iterates the composite map to a fixed point:
/// scattering from the moment scalar flux -> sweep -> closure fields ->
/// moment right-hand side -> moment solve. The outer unknown is the stacked
/// vector [varphi; current]; reentrant-face upwind data is lagged one outer
/// iteration and the moment solver is warm started from the previous one.
class SmmSolver {
 public:
  SmmSolver(const TransportProblem& prob, const SmmOptions& opt);

  const TransportSweeper& sweeper() const { return sweeper_; }
  const MomentSystem& moments() const { return *system_; }
  const SmmOptions& options() const { return opt_; }

  SmmResult solve();

 private:
  Vector apply_map(const Vector& x, SmmResult& scratch);

  const TransportProblem* prob_;
  SmmOptions opt_;
  TransportSweeper sweeper_;
  std::unique_ptr<MomentSystem> system_;
  std::unique_ptr<AngularFlux> psi_prev_;
  MomentSolution warm_;
};

/// One-call convenience wrapper.
SmmResult solve_smm(const TransportProblem& prob, const SmmOptions& opt);

}  // namespace smm
