#include <algorithm>
#include <cmath>
#include <vector>

#include "moment_common.hpp"

namespace smm::detail {

void FirstOrderKit::init(const MomentProblem& p, const FiniteElementSpace& y,
                         const FiniteElementSpace& v) {
  prob = &p;
  yfes = &y;
  vfes = &v;
  const Mesh& mesh = *p.mesh;
  const int order = 2 * p.degree + 2 * mesh.geom_degree() + p.extra_quad_order;
  vol_rule = make_quadrature_2d(order);
  face_rule = make_quadrature_1d(order);
  ytab = tabulate_scalar(y, vol_rule.points, /*with_grad=*/false);
  vtab = tabulate_vector(v, vol_rule.points, /*with_grad=*/true);
  vftab = tabulate_vector_faces(v, face_rule, /*with_grad=*/false);
  vol_geom = cache_volume_geometry(mesh, vol_rule);
  face_geom = cache_face_geometry(mesh, face_rule);
  side_frames = cache_face_side_frames(mesh, face_geom);
}

void FirstOrderKit::element_blocks(int e, std::vector<double>& mt, std::vector<double>& d,
                                   std::vector<double>& ma) const {
  const Mesh& mesh = *prob->mesh;
  const int nv = vfes->n_local_dofs();
  const int ny = yfes->n_local_dofs();
  mt.assign(static_cast<size_t>(nv) * nv, 0.0);
  d.assign(static_cast<size_t>(ny) * nv, 0.0);
  ma.assign(static_cast<size_t>(ny) * ny, 0.0);
  const double st = prob->sigma_t[e];
  const double sa = prob->sigma_a(e);

  for (int q = 0; q < vol_geom.nq; ++q) {
    const ElementFrame2& fr = vol_geom.at(e, q);
    const double w = vol_rule.weights[q];
    const double wj = w * fr.J;
    // (sigma_t v_i . v_j) dx: Piola values make this w sigma_t (F vhat_i).(F vhat_j)/J
    for (int i = 0; i < nv; ++i) {
      const Vec2 fi = fr.F.apply(vtab.v(q, i));
      for (int j = 0; j <= i; ++j) {
        const Vec2 fj = fr.F.apply(vtab.v(q, j));
        const double val = w * st * (fi.x * fj.x + fi.y * fj.y) / fr.J;
        mt[i * nv + j] += val;
        if (j != i) mt[j * nv + i] += val;
      }
    }
    // (u_i, div v_j) dx: reference-exact pairing
    for (int i = 0; i < ny; ++i)
      for (int j = 0; j < nv; ++j) d[i * nv + j] += w * ytab.v(q, i) * vtab.d(q, j);
    // sigma_a scalar mass
    for (int i = 0; i < ny; ++i)
      for (int j = 0; j < ny; ++j) ma[i * ny + j] += wj * sa * ytab.v(q, i) * ytab.v(q, j);
  }

  // Boundary closure (1/(3 E_b0)) (v_i.n)(v_j.n) on the element's boundary
  // faces; v.n dl = vhat.nhat cancels one arc-length factor.
  for (int lf = 0; lf < 4; ++lf) {
    const int fid = mesh.element_face(e, lf);
    const Face& face = mesh.face(fid);
    if (!face.boundary()) continue;
    const VectorTable& tab = vftab.at(lf, false);
    const Vec2 nhat = Mesh::face_ref_normal(lf);
    for (int q = 0; q < face_geom.nq; ++q) {
      const FaceFrame& fr = face_geom.at(fid, q);
      const double coef =
          face_rule.weights[q] / (3.0 * boundary_eb0(*prob, fr.n) * fr.dl);
      for (int i = 0; i < nv; ++i) {
        const double vi = tab.v(q, i).dot(nhat);
        if (vi == 0.0) continue;
        for (int j = 0; j < nv; ++j) mt[i * nv + j] += coef * vi * tab.v(q, j).dot(nhat);
      }
    }
  }
}

Vector FirstOrderKit::assemble_rhs(const MomentSources& src) const {
  const Mesh& mesh = *prob->mesh;
  const int nb_y = yfes->n_local_dofs();
  const int nb_v = vfes->n_local_dofs();
  const int n1 = vfes->n_dofs();
  Vector b(n1 + yfes->n_dofs(), 0.0);
  ClosureEval cl(src, vol_rule, face_rule);

  // Volume: b1 += (v, q1) + (grad v, T);  b0 += (u, q0)
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& vdofs = vfes->element_dofs(e);
    const auto& vsigns = vfes->element_signs(e);
    const auto& ydofs = yfes->element_dofs(e);
    for (int q = 0; q < vol_geom.nq; ++q) {
      const ElementFrame2& fr = vol_geom.at(e, q);
      const double wj = vol_rule.weights[q] * fr.J;
      const Vec2 q1 = eval_q1(src, fr.x);
      const double q0 = eval_q0(src, fr.x);
      const SymTensor t = cl.t_vol(e, q);
      for (int i = 0; i < nb_v; ++i) {
        const Vec2 v = FiniteElementSpace::piola_value(fr, vtab.v(q, i));
        double val = wj * (v.x * q1.x + v.y * q1.y);
        if (cl.active()) {
          const Mat2 g = FiniteElementSpace::piola_grad(fr, vtab.v(q, i), vtab.g(q, i));
          val += wj * (g.a[0][0] * t.xx + (g.a[0][1] + g.a[1][0]) * t.xy + g.a[1][1] * t.yy);
        }
        b[vdofs[i]] += vsigns[i] * val;
      }
      for (int i = 0; i < nb_y; ++i) b[n1 + ydofs[i]] += wj * ytab.v(q, i) * q0;
    }
  }

  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (face.boundary()) {
      // b1 += -(v, T n) + (v.n, (2 J_in + beta)/(3 E_b0)) over the boundary
      const auto& vdofs = vfes->element_dofs(face.elem1);
      const auto& vsigns = vfes->element_signs(face.elem1);
      const VectorTable& tab = vftab.at(face.local1, false);
      const Vec2 nhat = Mesh::face_ref_normal(face.local1);
      for (int q = 0; q < face_geom.nq; ++q) {
        const FaceFrame& fr = face_geom.at(f, q);
        const double w = face_rule.weights[q];
        const ElementFrame& ef = side_frames.at(f, 1, q);
        const Vec2 tn = cl.t_face(face, 1, q).apply(fr.n);
        const double data = (2.0 * eval_jin(src, fr.x, fr.n) +
                             eval_beta(src, face.elem1, fr.xi1, fr.n)) /
                            (3.0 * boundary_eb0(*prob, fr.n));
        for (int i = 0; i < nb_v; ++i) {
          const Vec2 v = FiniteElementSpace::piola_value(ef, tab.v(q, i));
          const double vn_ref = tab.v(q, i).dot(nhat);  // v.n dl = vhat.nhat
          b[vdofs[i]] += vsigns[i] * w * (-fr.dl * (v.x * tn.x + v.y * tn.y) + vn_ref * data);
        }
      }
      continue;
    }
    if (!cl.active()) continue;
    // b1 -= ([v], <T n>) over interior faces
    const VectorTable* tabs[2] = {&vftab.at(face.local1, false),
                                  &vftab.at(face.local2, !face.aligned)};
    const int elems[2] = {face.elem1, face.elem2};
    const double js[2] = {+1.0, -1.0};
    for (int q = 0; q < face_geom.nq; ++q) {
      const FaceFrame& fr = face_geom.at(f, q);
      const double w = face_rule.weights[q] * fr.dl;
      const Vec2 t1n = cl.t_face(face, 1, q).apply(fr.n);
      const Vec2 t2n = cl.t_face(face, 2, q).apply(fr.n);
      const Vec2 avg_tn{0.5 * (t1n.x + t2n.x), 0.5 * (t1n.y + t2n.y)};
      for (int s = 0; s < 2; ++s) {
        const auto& vdofs = vfes->element_dofs(elems[s]);
        const auto& vsigns = vfes->element_signs(elems[s]);
        const ElementFrame& ef = side_frames.at(f, s + 1, q);
        for (int i = 0; i < nb_v; ++i) {
          const Vec2 v = FiniteElementSpace::piola_value(ef, tabs[s]->v(q, i));
          b[vdofs[i]] -= vsigns[i] * js[s] * w * (v.x * avg_tn.x + v.y * avg_tn.y);
        }
      }
    }
  }
  return b;
}

namespace {

/// Mixed first-order discretization of the second-moment system: scalar flux
/// in the discontinuous space Y_p, current in the normal-continuous
/// Raviart-Thomas space. Block structure [Mt G; D Ma][J; phi] = [b1; b0]
/// with G = -(1/3) D^T; the iterative path solves the sign-scaled symmetric
/// form with a minimum-residual method and a block-diagonal preconditioner.
class RtSystem final : public MomentSystem {
 public:
  RtSystem(const MomentProblem& prob, const MomentOptions& opt) {
    prob_ = prob;
    opt_ = opt;
    const Mesh& mesh = *prob_.mesh;
    scalar_space_ = std::make_unique<FiniteElementSpace>(mesh, SpaceKind::DG, prob_.degree);
    current_space_ = std::make_unique<FiniteElementSpace>(mesh, SpaceKind::RT, prob_.degree);
    kit_.init(prob_, *scalar_space_, *current_space_);

    assemble_blocks();
    if (opt_.solver == MomentSolverKind::Krylov) {
      precond_ = std::make_unique<BlockPreconditioner>(blocks_, BlockPrecondKind::Diagonal);
      precond_op_ = precond_->as_operator();
    } else {
      monolithic_ = assemble_monolithic();
      direct_ = std::make_unique<DirectSolver>(monolithic_, DirectSolver::Kind::LU);
    }
  }

  MethodKind kind() const override { return MethodKind::RT; }
  const BlockSystem* blocks() const override { return &blocks_; }
  double lhs_checksum() const override {
    double s = 0.0;
    for (const SparseMatrix* m : {&blocks_.Mt, &blocks_.G, &blocks_.D, &blocks_.Ma})
      for (double v : m->values()) s += std::abs(v);
    return s;
  }

  Vector assemble_rhs(const MomentSources& src) const override { return kit_.assemble_rhs(src); }

  MomentSolution solve(const Vector& rhs, const MomentSolution* guess) const override {
    const int n1 = blocks_.n1, n2 = blocks_.n2;
    MomentSolution sol;
    Vector x(n1 + n2, 0.0);
    if (guess && static_cast<int>(guess->current.size()) == n1 &&
        static_cast<int>(guess->varphi.size()) == n2) {
      std::copy(guess->current.begin(), guess->current.end(), x.begin());
      std::copy(guess->varphi.begin(), guess->varphi.end(), x.begin() + n1);
    }
    if (opt_.solver == MomentSolverKind::Direct) {
      direct_->solve(rhs, x);
      sol.report.converged = true;
      sol.report.note = "direct";
    } else {
      Vector scaled = rhs;
      for (int i = 0; i < n1; ++i) scaled[i] *= -3.0;
      KrylovOptions kopt;
      kopt.kind = KrylovKind::MINRES;
      kopt.tol = opt_.tol;
      kopt.max_iter = opt_.max_iter;
      sol.report = krylov_solve(blocks_.scaled_operator(), scaled, x, kopt, &precond_op_);
    }
    sol.current.assign(x.begin(), x.begin() + n1);
    sol.varphi.assign(x.begin() + n1, x.end());
    return sol;
  }

 private:
  void assemble_blocks() {
    const Mesh& mesh = *prob_.mesh;
    const FiniteElementSpace& yfes = *scalar_space_;
    const FiniteElementSpace& vfes = *current_space_;
    const int nb_y = yfes.n_local_dofs();
    const int nb_v = vfes.n_local_dofs();
    std::vector<Triplet> t_mt, t_g, t_d, t_ma;
    std::vector<double> loc_mt, loc_d, loc_ma;
    std::vector<double> loc_g(static_cast<size_t>(nb_v) * nb_y);
    const std::vector<double> no_signs;

    for (int e = 0; e < mesh.n_elements(); ++e) {
      kit_.element_blocks(e, loc_mt, loc_d, loc_ma);
      // G(v_i, u_j) = -(1/3)(div v_i, u_j): assembled by its own quadrature
      // loop (not copied from D) so the -(1/3) D^T identity is a real check.
      std::fill(loc_g.begin(), loc_g.end(), 0.0);
      for (int q = 0; q < kit_.vol_geom.nq; ++q) {
        const double w = kit_.vol_rule.weights[q];
        for (int i = 0; i < nb_v; ++i)
          for (int j = 0; j < nb_y; ++j)
            loc_g[i * nb_y + j] -= (1.0 / 3.0) * w * kit_.vtab.d(q, i) * kit_.ytab.v(q, j);
      }
      const auto& vdofs = vfes.element_dofs(e);
      const auto& vsigns = vfes.element_signs(e);
      const auto& ydofs = yfes.element_dofs(e);
      scatter_block(vdofs, vsigns, vdofs, vsigns, loc_mt, t_mt);
      scatter_block(vdofs, vsigns, ydofs, no_signs, loc_g, t_g);
      scatter_block(ydofs, no_signs, vdofs, vsigns, loc_d, t_d);
      scatter_block(ydofs, no_signs, ydofs, no_signs, loc_ma, t_ma);
    }

    const int n1 = vfes.n_dofs();
    const int n2 = yfes.n_dofs();
    blocks_.Mt = SparseMatrix::from_triplets(n1, n1, t_mt);
    blocks_.G = SparseMatrix::from_triplets(n1, n2, t_g);
    blocks_.D = SparseMatrix::from_triplets(n2, n1, t_d);
    blocks_.Ma = SparseMatrix::from_triplets(n2, n2, t_ma);
    blocks_.n1 = n1;
    blocks_.n2 = n2;
  }

  SparseMatrix assemble_monolithic() const {
    const int n1 = blocks_.n1, n2 = blocks_.n2;
    std::vector<Triplet> trips;
    auto append = [&trips](const SparseMatrix& m, int r0, int c0) {
      for (int i = 0; i < m.rows(); ++i)
        for (int k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k)
          trips.push_back({r0 + i, c0 + m.col_idx()[k], m.values()[k]});
    };
    append(blocks_.Mt, 0, 0);
    append(blocks_.G, 0, n1);
    append(blocks_.D, n1, 0);
    append(blocks_.Ma, n1, n1);
    return SparseMatrix::from_triplets(n1 + n2, n1 + n2, trips);
  }

  FirstOrderKit kit_;
  BlockSystem blocks_;
  std::unique_ptr<BlockPreconditioner> precond_;
  LinearOperator precond_op_;
  SparseMatrix monolithic_;
  std::unique_ptr<DirectSolver> direct_;
};

}  // namespace

std::unique_ptr<MomentSystem> make_rt_system(const MomentProblem& prob, const MomentOptions& opt) {
  return std::make_unique<RtSystem>(prob, opt);
}

}  // namespace smm::detail
