#pragma once

#include <memory>
#include <string>
#include <vector>

#include "smm/closures.hpp"
#include "smm/solvers.hpp"

namespace smm {

enum class MethodKind { IP, CG, RT, HRT };

const char* method_name(MethodKind k);
MethodKind method_from_name(const std::string& name);  // "ip" | "cg" | "rt" | "hrt"

enum class MomentSolverKind { Krylov, Direct };

/// Data defining a moment system independent of the transport iterate:
/// mesh, polynomial degree, cross sections, the angular quadrature (for the
/// boundary constant E_b0), and the interior-penalty scaling.
struct MomentProblem {
  const Mesh* mesh = nullptr;
  int degree = 1;
  std::vector<double> sigma_t, sigma_s;  // per element
  AngularQuadrature quad;
  double penalty_scale = 1.0;
  /// Added to the default quadrature order 2p + 2m of every form; the
  /// defaults already integrate all affine-mesh forms exactly.
  int extra_quad_order = 0;

  double sigma_a(int e) const { return sigma_t[e] - sigma_s[e]; }
  void validate() const;
};

struct MomentOptions {
  MethodKind kind = MethodKind::IP;
  MomentSolverKind solver = MomentSolverKind::Krylov;
  double tol = 1e-8;   // inner (linear solver) relative tolerance
  int max_iter = 5000;
  /// The lower-triangular block preconditioner is non-symmetric; requesting
  /// it for the MINRES-solved first-order system is a configuration error.
  bool rt_triangular_precond = false;
};

struct MomentSolution {
  Vector varphi;      // scalar flux coefficients in the method's scalar space
  Vector current;     // RT: shared dofs; HRT: broken dofs; IP/CG: empty
  Vector multiplier;  // HRT: trace unknowns; else empty
  SolveReport report;
};

/// An assembled SMM moment discretization. The left-hand side is built once
/// at construction and never mutated; only the right-hand side depends on
/// the transport iterate.
class MomentSystem {
 public:
  virtual ~MomentSystem() = default;

  virtual MethodKind kind() const = 0;
  const MomentProblem& problem() const { return prob_; }
  const FiniteElementSpace& scalar_space() const { return *scalar_space_; }
  const FiniteElementSpace* current_space() const { return current_space_.get(); }

  int n_scalar() const { return scalar_space_->n_dofs(); }
  int n_current() const { return current_space_ ? current_space_->n_dofs() : 0; }
  /// Length of the stacked fixed-point unknown [varphi; current].
  int n_unknowns() const { return n_scalar() + n_current(); }

  /// Right-hand side for the given transport-coupled sources, in the
  /// method's internal layout (scalar for IP/CG, stacked blocks for RT/HRT).
  virtual Vector assemble_rhs(const MomentSources& src) const = 0;

  /// Solve against an assembled right-hand side; `guess` (may be null) warm
  /// starts the iterative solvers with the previous outer iterate.
  virtual MomentSolution solve(const Vector& rhs, const MomentSolution* guess) const = 0;

  /// Deterministic fingerprint of the assembled left-hand side (used to
  /// verify the operator is iteration-invariant).
  virtual double lhs_checksum() const = 0;

  // Introspection for verification; null when not applicable to the kind.
  virtual const SparseMatrix* matrix() const { return nullptr; }        // IP / CG
  virtual const BlockSystem* blocks() const { return nullptr; }         // RT
  virtual const SparseMatrix* trace_matrix() const { return nullptr; }  // HRT (SPD, negated)

 protected:
  MomentProblem prob_;
  MomentOptions opt_;
  std::unique_ptr<FiniteElementSpace> scalar_space_;
  std::unique_ptr<FiniteElementSpace> current_space_;
};

std::unique_ptr<MomentSystem> make_moment_system(const MomentProblem& prob,
                                                 const MomentOptions& opt);

}  // namespace smm
