#include <algorithm>
#include <cmath>
#include <vector>

#include "moment_common.hpp"

namespace smm::detail {
namespace {

/// Interior-penalty discretization of the second-moment diffusion system in
/// the discontinuous scalar space Y_p. The bilinear form combines the
/// diffusion volume terms, symmetric consistency terms and a penalty on
/// interior faces, and the boundary factor E_b0; the linear form carries the
/// source moments and the transport closures (correction tensor T on volume
/// and faces, boundary factor beta).
class IpSystem final : public MomentSystem {
 public:
  IpSystem(const MomentProblem& prob, const MomentOptions& opt) {
    prob_ = prob;
    opt_ = opt;
    const Mesh& mesh = *prob_.mesh;
    scalar_space_ = std::make_unique<FiniteElementSpace>(mesh, SpaceKind::DG, prob_.degree);

    const int order = 2 * prob_.degree + 2 * mesh.geom_degree() + prob_.extra_quad_order;
    vol_rule_ = make_quadrature_2d(order);
    face_rule_ = make_quadrature_1d(order);
    vol_tab_ = tabulate_scalar(*scalar_space_, vol_rule_.points, /*with_grad=*/true);
    face_tab_ = tabulate_scalar_faces(*scalar_space_, face_rule_, /*with_grad=*/true);
    vol_geom_ = cache_volume_geometry(mesh, vol_rule_);
    face_geom_ = cache_face_geometry(mesh, face_rule_);
    side_frames_ = cache_face_side_frames(mesh, face_geom_);

    assemble_lhs();
    if (opt_.solver == MomentSolverKind::Krylov) {
      precond_ = make_sgs_preconditioner(matrix_);
    } else {
      direct_ = std::make_unique<DirectSolver>(matrix_, DirectSolver::Kind::LDLT);
    }
  }

  MethodKind kind() const override { return MethodKind::IP; }
  const SparseMatrix* matrix() const override { return &matrix_; }
  double lhs_checksum() const override {
    double s = 0.0;
    for (double v : matrix_.values()) s += std::abs(v);
    return s;
  }

  Vector assemble_rhs(const MomentSources& src) const override {
    const Mesh& mesh = *prob_.mesh;
    const FiniteElementSpace& fes = *scalar_space_;
    const int nb = fes.n_local_dofs();
    Vector b(fes.n_dofs(), 0.0);
    ClosureEval cl(src, vol_rule_, face_rule_);

    // Volume: (u, q0) + (grad u, (q1 - div T)/sigma_t)
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const auto& dofs = fes.element_dofs(e);
      const double inv_st = 1.0 / prob_.sigma_t[e];
      for (int q = 0; q < vol_geom_.nq; ++q) {
        const ElementFrame2& fr = vol_geom_.at(e, q);
        const double wj = vol_rule_.weights[q] * fr.J;
        const double q0 = eval_q0(src, fr.x);
        Vec2 flux = eval_q1(src, fr.x);
        const Vec2 divt = cl.div_t_vol(e, q, fr);
        flux.x = (flux.x - divt.x) * inv_st;
        flux.y = (flux.y - divt.y) * inv_st;
        for (int i = 0; i < nb; ++i) {
          const Vec2 g = FiniteElementSpace::physical_grad(fr, vol_tab_.g(q, i));
          b[dofs[i]] += wj * (vol_tab_.v(q, i) * q0 + g.x * flux.x + g.y * flux.y);
        }
      }
    }

    for (int f = 0; f < mesh.n_faces(); ++f) {
      const Face& face = mesh.face(f);
      if (face.boundary()) {
        // -(u, 2 J_in + beta) on the boundary
        const auto& dofs = fes.element_dofs(face.elem1);
        const ScalarTable& tab = face_tab_.at(face.local1, false);
        for (int q = 0; q < face_geom_.nq; ++q) {
          const FaceFrame& fr = face_geom_.at(f, q);
          const double w = face_rule_.weights[q] * fr.dl;
          const double data =
              2.0 * eval_jin(src, fr.x, fr.n) + eval_beta(src, face.elem1, fr.xi1, fr.n);
          for (int i = 0; i < nb; ++i) b[dofs[i]] -= w * tab.v(q, i) * data;
        }
        continue;
      }
      // Interior: -([u], <(q1 - div T).n / sigma_t>) + (<grad u / sigma_t>, [T n])
      const int e1 = face.elem1, e2 = face.elem2;
      const double inv_st1 = 1.0 / prob_.sigma_t[e1];
      const double inv_st2 = 1.0 / prob_.sigma_t[e2];
      const ScalarTable& tab1 = face_tab_.at(face.local1, false);
      const ScalarTable& tab2 = face_tab_.at(face.local2, !face.aligned);
      const auto& dofs1 = fes.element_dofs(e1);
      const auto& dofs2 = fes.element_dofs(e2);
      for (int q = 0; q < face_geom_.nq; ++q) {
        const FaceFrame& fr = face_geom_.at(f, q);
        const double w = face_rule_.weights[q] * fr.dl;
        const ElementFrame& ef1 = side_frames_.at(f, 1, q);
        const ElementFrame& ef2 = side_frames_.at(f, 2, q);

        const Vec2 q1 = eval_q1(src, fr.x);
        const Vec2 d1 = cl.div_t_face(face, 1, q, ef1);
        const Vec2 d2 = cl.div_t_face(face, 2, q, ef2);
        const double avg_flux_n =
            0.5 * (((q1.x - d1.x) * fr.n.x + (q1.y - d1.y) * fr.n.y) * inv_st1 +
                   ((q1.x - d2.x) * fr.n.x + (q1.y - d2.y) * fr.n.y) * inv_st2);

        const Vec2 t1n = cl.t_face(face, 1, q).apply(fr.n);
        const Vec2 t2n = cl.t_face(face, 2, q).apply(fr.n);
        const Vec2 jump_tn{t1n.x - t2n.x, t1n.y - t2n.y};

        for (int i = 0; i < nb; ++i) {
          const Vec2 g1 = FiniteElementSpace::physical_grad(ef1, tab1.g(q, i));
          const Vec2 g2 = FiniteElementSpace::physical_grad(ef2, tab2.g(q, i));
          b[dofs1[i]] += w * (-tab1.v(q, i) * avg_flux_n +
                              0.5 * inv_st1 * (g1.x * jump_tn.x + g1.y * jump_tn.y));
          b[dofs2[i]] += w * (+tab2.v(q, i) * avg_flux_n +
                              0.5 * inv_st2 * (g2.x * jump_tn.x + g2.y * jump_tn.y));
        }
      }
    }
    return b;
  }

  MomentSolution solve(const Vector& rhs, const MomentSolution* guess) const override {
    MomentSolution sol;
    sol.varphi.assign(scalar_space_->n_dofs(), 0.0);
    if (guess && guess->varphi.size() == sol.varphi.size()) sol.varphi = guess->varphi;
    if (opt_.solver == MomentSolverKind::Direct) {
      direct_->solve(rhs, sol.varphi);
      sol.report.converged = true;
      sol.report.note = "direct";
      return sol;
    }
    KrylovOptions kopt;
    kopt.kind = KrylovKind::CG;
    kopt.tol = opt_.tol;
    kopt.max_iter = opt_.max_iter;
    sol.report = krylov_solve(LinearOperator::view(matrix_, /*symmetric=*/true), rhs, sol.varphi,
                              kopt, &precond_);
    return sol;
  }

 private:
  void assemble_lhs() {
    const Mesh& mesh = *prob_.mesh;
    const FiniteElementSpace& fes = *scalar_space_;
    const int nb = fes.n_local_dofs();
    std::vector<Triplet> trips;
    std::vector<double> local(static_cast<size_t>(nb) * nb);
    const std::vector<double> no_signs;

    // Volume: (grad u, D grad phi) + (u, sigma_a phi), D = 1/(3 sigma_t)
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const double dcoef = 1.0 / (3.0 * prob_.sigma_t[e]);
      const double sa = prob_.sigma_a(e);
      std::fill(local.begin(), local.end(), 0.0);
      for (int q = 0; q < vol_geom_.nq; ++q) {
        const ElementFrame2& fr = vol_geom_.at(e, q);
        const double wj = vol_rule_.weights[q] * fr.J;
        for (int i = 0; i < nb; ++i) {
          const double ui = vol_tab_.v(q, i);
          const Vec2 gi = FiniteElementSpace::physical_grad(fr, vol_tab_.g(q, i));
          for (int j = 0; j < nb; ++j) {
            const Vec2 gj = FiniteElementSpace::physical_grad(fr, vol_tab_.g(q, j));
            local[i * nb + j] +=
                wj * (dcoef * (gi.x * gj.x + gi.y * gj.y) + sa * ui * vol_tab_.v(q, j));
          }
        }
      }
      scatter_block(fes.element_dofs(e), no_signs, fes.element_dofs(e), no_signs, local, trips);
    }

    for (int f = 0; f < mesh.n_faces(); ++f) {
      const Face& face = mesh.face(f);
      if (face.boundary()) {
        // (u, E_b0 phi) on the boundary
        const ScalarTable& tab = face_tab_.at(face.local1, false);
        std::fill(local.begin(), local.end(), 0.0);
        for (int q = 0; q < face_geom_.nq; ++q) {
          const FaceFrame& fr = face_geom_.at(f, q);
          const double w = face_rule_.weights[q] * fr.dl * boundary_eb0(prob_, fr.n);
          for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) local[i * nb + j] += w * tab.v(q, i) * tab.v(q, j);
        }
        scatter_block(fes.element_dofs(face.elem1), no_signs, fes.element_dofs(face.elem1),
                      no_signs, local, trips);
        continue;
      }

      // Interior: kappa ([u],[phi]) - ([u],<D grad phi.n>) - (<D grad u.n>,[phi])
      const double kappa = face_penalty(prob_, mesh, face);
      const double dc[2] = {1.0 / (3.0 * prob_.sigma_t[face.elem1]),
                            1.0 / (3.0 * prob_.sigma_t[face.elem2])};
      const ScalarTable* tabs[2] = {&face_tab_.at(face.local1, false),
                                    &face_tab_.at(face.local2, !face.aligned)};
      const std::vector<int>* dofs[2] = {&fes.element_dofs(face.elem1),
                                         &fes.element_dofs(face.elem2)};
      const double js[2] = {+1.0, -1.0};

      for (int su = 0; su < 2; ++su) {
        for (int sv = 0; sv < 2; ++sv) {
          std::fill(local.begin(), local.end(), 0.0);
          for (int q = 0; q < face_geom_.nq; ++q) {
            const FaceFrame& fr = face_geom_.at(f, q);
            const double w = face_rule_.weights[q] * fr.dl;
            const ElementFrame& efu = side_frames_.at(f, su + 1, q);
            const ElementFrame& efv = side_frames_.at(f, sv + 1, q);
            for (int i = 0; i < nb; ++i) {
              const double ui = tabs[su]->v(q, i);
              const Vec2 gi = FiniteElementSpace::physical_grad(efu, tabs[su]->g(q, i));
              const double gin = dc[su] * (gi.x * fr.n.x + gi.y * fr.n.y);
              for (int j = 0; j < nb; ++j) {
                const double vj = tabs[sv]->v(q, j);
                const Vec2 gj = FiniteElementSpace::physical_grad(efv, tabs[sv]->g(q, j));
                const double gjn = dc[sv] * (gj.x * fr.n.x + gj.y * fr.n.y);
                local[i * nb + j] += w * (kappa * js[su] * js[sv] * ui * vj -
                                          js[su] * ui * 0.5 * gjn - 0.5 * gin * js[sv] * vj);
              }
            }
          }
          scatter_block(*dofs[su], no_signs, *dofs[sv], no_signs, local, trips);
        }
      }
    }
    matrix_ = SparseMatrix::from_triplets(fes.n_dofs(), fes.n_dofs(), trips);
  }

  QuadratureRule2D vol_rule_;
  QuadratureRule1D face_rule_;
  ScalarTable vol_tab_;
  ScalarFaceTables face_tab_;
  VolumeGeometry vol_geom_;
  FaceGeometry face_geom_;
  FaceSideFrames side_frames_;
  SparseMatrix matrix_;
  LinearOperator precond_;
  std::unique_ptr<DirectSolver> direct_;
};

}  // namespace

std::unique_ptr<MomentSystem> make_ip_system(const MomentProblem& prob, const MomentOptions& opt) {
  return std::make_unique<IpSystem>(prob, opt);
}

}  // namespace smm::detail
