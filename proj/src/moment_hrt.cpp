#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "moment_common.hpp"

namespace smm::detail {
namespace {

/// Hybridized first-order discretization: the current lives in the broken
/// (element-local) Raviart-Thomas space, normal continuity is imposed weakly
/// by a face multiplier, and the element unknowns are eliminated. What is
/// solved globally is the condensed trace system, which after the sign
/// scaling of the first-moment rows (and one overall negation) is symmetric
/// positive definite. Element blocks and right-hand side come from the same
/// kit as the normal-continuous variant, so the two solutions agree to
/// solver tolerance.
class HrtSystem final : public MomentSystem {
 public:
  HrtSystem(const MomentProblem& prob, const MomentOptions& opt) {
    prob_ = prob;
    opt_ = opt;
    const Mesh& mesh = *prob_.mesh;
    scalar_space_ = std::make_unique<FiniteElementSpace>(mesh, SpaceKind::DG, prob_.degree);
    current_space_ = std::make_unique<FiniteElementSpace>(mesh, SpaceKind::BrokenRT, prob_.degree);
    trace_space_ = std::make_unique<FiniteElementSpace>(mesh, SpaceKind::Trace, prob_.degree);
    kit_.init(prob_, *scalar_space_, *current_space_);
    trace_tab_ = tabulate_trace(*trace_space_, kit_.face_rule);

    condense();
    if (trace_space_->n_dofs() > 0) {
      if (opt_.solver == MomentSolverKind::Krylov) {
        precond_ = make_sgs_preconditioner(neg_h_);
      } else {
        direct_ = std::make_unique<DirectSolver>(neg_h_, DirectSolver::Kind::LDLT);
      }
    }
  }

  MethodKind kind() const override { return MethodKind::HRT; }
  const FiniteElementSpace& trace_space() const { return *trace_space_; }
  const SparseMatrix* trace_matrix() const override { return &neg_h_; }
  double lhs_checksum() const override {
    double s = block_checksum_;
    for (double v : neg_h_.values()) s += std::abs(v);
    return s;
  }

  Vector assemble_rhs(const MomentSources& src) const override { return kit_.assemble_rhs(src); }

  MomentSolution solve(const Vector& rhs, const MomentSolution* guess) const override {
    const Mesh& mesh = *prob_.mesh;
    const FiniteElementSpace& yfes = *scalar_space_;
    const FiniteElementSpace& vfes = *current_space_;
    const int nv = vfes.n_local_dofs();
    const int ny = yfes.n_local_dofs();
    const int nu = nv + ny;
    const int n1 = vfes.n_dofs();
    const int nl = trace_space_->n_dofs();
    const int ne = mesh.n_elements();

    // Forward eliminate: y_K = Atilde_K^{-1} btilde_K, g = sum C~_K y_K.
    std::vector<Eigen::VectorXd> yk(ne);
    Vector g(nl, 0.0);
    Eigen::VectorXd bt(nu);
    for (int e = 0; e < ne; ++e) {
      const auto& vdofs = vfes.element_dofs(e);
      const auto& ydofs = yfes.element_dofs(e);
      for (int i = 0; i < nv; ++i) bt(i) = -3.0 * rhs[vdofs[i]];
      for (int j = 0; j < ny; ++j) bt(nv + j) = rhs[n1 + ydofs[j]];
      yk[e] = lu_[e].solve(bt);
      const auto& lam = lam_dofs_[e];
      if (!lam.empty()) {
        const Eigen::VectorXd gl = ct_[e] * yk[e];
        for (size_t m = 0; m < lam.size(); ++m) g[lam[m]] += gl(static_cast<int>(m));
      }
    }

    // Trace solve (negated system is SPD): (-H) lambda = -g.
    MomentSolution sol;
    Vector lambda(nl, 0.0);
    if (nl > 0) {
      Vector tr_rhs(nl);
      for (int i = 0; i < nl; ++i) tr_rhs[i] = -g[i];
      if (guess && static_cast<int>(guess->multiplier.size()) == nl) lambda = guess->multiplier;
      if (opt_.solver == MomentSolverKind::Direct) {
        direct_->solve(tr_rhs, lambda);
        sol.report.converged = true;
        sol.report.note = "direct";
      } else {
        KrylovOptions kopt;
        kopt.kind = KrylovKind::CG;
        kopt.tol = opt_.tol;
        kopt.max_iter = opt_.max_iter;
        sol.report = krylov_solve(LinearOperator::view(neg_h_, /*symmetric=*/true), tr_rhs,
                                  lambda, kopt, &precond_);
      }
    } else {
      sol.report.converged = true;
      sol.report.note = "no interior faces";
    }

    // Back substitute: u_K = y_K - Atilde_K^{-1} C~_K^T lambda.
    sol.varphi.assign(yfes.n_dofs(), 0.0);
    sol.current.assign(n1, 0.0);
    for (int e = 0; e < ne; ++e) {
      Eigen::VectorXd u = yk[e];
      const auto& lam = lam_dofs_[e];
      if (!lam.empty()) {
        Eigen::VectorXd ll(static_cast<int>(lam.size()));
        for (size_t m = 0; m < lam.size(); ++m) ll(static_cast<int>(m)) = lambda[lam[m]];
        u -= xct_[e] * ll;
      }
      const auto& vdofs = vfes.element_dofs(e);
      const auto& ydofs = yfes.element_dofs(e);
      for (int i = 0; i < nv; ++i) sol.current[vdofs[i]] = u(i);
      for (int j = 0; j < ny; ++j) sol.varphi[ydofs[j]] = u(nv + j);
    }
    sol.multiplier = std::move(lambda);
    return sol;
  }

 private:
  void condense() {
    const Mesh& mesh = *prob_.mesh;
    const FiniteElementSpace& yfes = *scalar_space_;
    const FiniteElementSpace& vfes = *current_space_;
    const int nv = vfes.n_local_dofs();
    const int ny = yfes.n_local_dofs();
    const int nu = nv + ny;
    const int ne = mesh.n_elements();
    const int nl = trace_space_->n_dofs();
    const int nq = kit_.face_geom.nq;

    lu_.reserve(ne);
    ct_.resize(ne);
    xct_.resize(ne);
    lam_dofs_.resize(ne);
    std::vector<Triplet> trips;
    std::vector<double> mt, d, ma;

    for (int e = 0; e < ne; ++e) {
      kit_.element_blocks(e, mt, d, ma);
      const auto& signs = vfes.element_signs(e);

      // Sign-scaled element matrix [-3 Mt, D^T; D, Ma] in global-coefficient
      // convention (vector dof signs folded in).
      Eigen::MatrixXd a(nu, nu);
      for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j)
          a(i, j) = -3.0 * signs[i] * signs[j] * mt[i * nv + j];
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nv; ++i) {
          const double val = signs[i] * d[j * nv + i];
          a(i, nv + j) = val;
          a(nv + j, i) = val;
        }
      for (int i = 0; i < ny; ++i)
        for (int j = 0; j < ny; ++j) a(nv + i, nv + j) = ma[i * ny + j];
      block_checksum_ += a.cwiseAbs().sum();
      lu_.emplace_back(a);

      // Constraint rows: for each interior face of the element,
      // C(mu, v) = int mu (v . n_K) ds with the element's own outward normal;
      // v.n dl = vhat.nhat makes the integrand geometry-free. Scaled by -3 to
      // match the sign-scaled first-moment rows.
      std::vector<int>& lam = lam_dofs_[e];
      std::vector<std::array<int, 2>> face_slots;  // (local face, first row)
      for (int lf = 0; lf < 4; ++lf) {
        const Face& face = mesh.face(mesh.element_face(e, lf));
        if (face.boundary()) continue;
        const auto& fdofs = trace_space_->face_dofs(mesh.element_face(e, lf));
        face_slots.push_back({lf, static_cast<int>(lam.size())});
        lam.insert(lam.end(), fdofs.begin(), fdofs.end());
      }
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<int>(lam.size()), nu);
      const int ntr = trace_tab_.nb;
      for (const auto& slot : face_slots) {
        const int lf = slot[0];
        const int row0 = slot[1];
        const Face& face = mesh.face(mesh.element_face(e, lf));
        const bool flip = face.elem1 == e ? false : !face.aligned;
        const VectorTable& tab = kit_.vftab.at(lf, flip);
        const Vec2 nhat = Mesh::face_ref_normal(lf);
        for (int q = 0; q < nq; ++q) {
          const double w = kit_.face_rule.weights[q];
          for (int m = 0; m < ntr; ++m) {
            const double mu = trace_tab_.v(q, m);
            for (int i = 0; i < nv; ++i) {
              const double vn = tab.v(q, i).dot(nhat);
              if (vn != 0.0) c(row0 + m, i) += -3.0 * w * mu * vn * signs[i];
            }
          }
        }
      }
      ct_[e] = c;
      xct_[e] = lu_[e].solve(c.transpose());

      // Condensed contribution C~ Atilde^{-1} C~^T; the assembled matrix is
      // negated so the global trace operator is positive definite.
      const Eigen::MatrixXd h = c * xct_[e];
      for (int r = 0; r < h.rows(); ++r)
        for (int s = 0; s < h.cols(); ++s)
          trips.push_back({lam[r], lam[s], -h(r, s)});
    }
    neg_h_ = SparseMatrix::from_triplets(nl, nl, trips);
  }

  std::unique_ptr<FiniteElementSpace> trace_space_;
  FirstOrderKit kit_;
  ScalarTable trace_tab_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
  std::vector<Eigen::MatrixXd> ct_;   // scaled constraint blocks
  std::vector<Eigen::MatrixXd> xct_;  // Atilde^{-1} C~^T
  std::vector<std::vector<int>> lam_dofs_;
  SparseMatrix neg_h_;
  LinearOperator precond_;
  std::unique_ptr<DirectSolver> direct_;
  double block_checksum_ = 0.0;
};

}  // namespace

std::unique_ptr<MomentSystem> make_hrt_system(const MomentProblem& prob,
                                              const MomentOptions& opt) {
  return std::make_unique<HrtSystem>(prob, opt);
}

}  // namespace smm::detail
