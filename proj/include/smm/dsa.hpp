#pragma once

#include "smm/moment_system.hpp"
#include "smm/transport.hpp"

namespace smm {

struct DsaOptions {
  double tol = 1e-6;  // outer: max-norm of the scalar flux update
  int max_iter = 2000;
  MomentSolverKind solver = MomentSolverKind::Krylov;
  double inner_tol = 1e-10;
  int inner_max_iter = 20000;
  double penalty_scale = 1.0;
};

struct DsaResult {
  /// Scalar flux coefficients on the transport solver's discontinuous space.
  Vector phi;
  int iterations = 0;  // transport sweeps performed
  bool converged = false;
  double final_delta = 0.0;
};

/// Diffusion-accelerated source iteration: each transport sweep (scattering
/// evaluated at the previous scalar flux) is followed by a correction solve
/// with the interior-penalty moment operator, driven by the mass-weighted
/// scattering residual (sigma_s (phi_half - phi_old), u). Used as the
/// reference transport answer when assessing the moment methods' angular
/// convergence.
DsaResult dsa_reference_solve(const TransportProblem& prob, const DsaOptions& opt = {});

}  // namespace smm
