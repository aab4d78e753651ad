#pragma once

#include <functional>
#include <vector>

#include "smm/sparse.hpp"

namespace smm {

// Options for the accelerated fixed-point loop. `anderson_space` is the
// maximum number of residual differences retained; zero reproduces plain
// Picard iteration exactly (bit for bit).
struct FixedPointOptions {
  double tol = 1e-6;       // max-norm tolerance on successive iterates
  int max_iter = 200;      // maximum number of map evaluations
  int anderson_space = 0;  // history size (0 = Picard)
};

struct FixedPointResult {
  Vector x;                    // final iterate
  int iterations = 0;          // number of map evaluations performed
  bool converged = false;      // true when the delta dropped below tol
  double final_delta = 0.0;    // last max-norm update size
  std::vector<double> deltas;  // per-iteration update sizes
};

// Solves x = g(x) by Anderson-accelerated fixed-point iteration (type II,
// undamped). The least-squares subproblem is solved by a rank-revealing QR
// factorization; when the difference matrix becomes rank deficient the
// history is discarded and the iteration restarts from a plain update.
FixedPointResult fixed_point_solve(const std::function<Vector(const Vector&)>& g,
                                   const Vector& x0, const FixedPointOptions& opt);

}  // namespace smm
