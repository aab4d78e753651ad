#include "smm/moment_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "moment_common.hpp"

namespace smm {

const char* method_name(MethodKind k) {
  switch (k) {
    case MethodKind::IP: return "ip";
    case MethodKind::CG: return "cg";
    case MethodKind::RT: return "rt";
    case MethodKind::HRT: return "hrt";
  }
  return "?";
}

MethodKind method_from_name(const std::string& name) {
  if (name == "ip") return MethodKind::IP;
  if (name == "cg") return MethodKind::CG;
  if (name == "rt") return MethodKind::RT;
  if (name == "hrt") return MethodKind::HRT;
  throw std::invalid_argument("unknown moment method '" + name + "' (expected ip|cg|rt|hrt)");
}

void MomentProblem::validate() const {
  if (!mesh) throw std::invalid_argument("moment problem: mesh is null");
  if (degree < 1) throw std::invalid_argument("moment problem: degree must be >= 1");
  const auto ne = static_cast<size_t>(mesh->n_elements());
  if (sigma_t.size() != ne || sigma_s.size() != ne)
    throw std::invalid_argument("moment problem: cross sections must have one entry per element");
  if (quad.size() == 0) throw std::invalid_argument("moment problem: empty angular quadrature");
  for (size_t e = 0; e < ne; ++e) {
    if (!(sigma_t[e] > 0.0))
      throw std::invalid_argument("moment problem: sigma_t must be positive");
    if (sigma_s[e] < 0.0 || sigma_s[e] > sigma_t[e])
      throw std::invalid_argument("moment problem: need 0 <= sigma_s <= sigma_t");
  }
  if (!(penalty_scale > 0.0))
    throw std::invalid_argument("moment problem: penalty scale must be positive");
  if (extra_quad_order < 0)
    throw std::invalid_argument("moment problem: extra quadrature order must be >= 0");
}

std::unique_ptr<MomentSystem> make_moment_system(const MomentProblem& prob,
                                                 const MomentOptions& opt) {
  prob.validate();
  if (opt.kind == MethodKind::RT && opt.solver == MomentSolverKind::Krylov &&
      opt.rt_triangular_precond) {
    throw std::invalid_argument(
        "first-order system: the lower-triangular block preconditioner is not symmetric "
        "and cannot be used with a minimum-residual solver; use the block-diagonal one");
  }
  switch (opt.kind) {
    case MethodKind::IP: return detail::make_ip_system(prob, opt);
    case MethodKind::CG: return detail::make_cg_system(prob, opt);
    case MethodKind::RT: return detail::make_rt_system(prob, opt);
    case MethodKind::HRT: return detail::make_hrt_system(prob, opt);
  }
  throw std::logic_error("unreachable moment method kind");
}

namespace detail {

FaceSideFrames cache_face_side_frames(const Mesh& mesh, const FaceGeometry& fg) {
  FaceSideFrames out;
  out.nq = fg.nq;
  const int nf = mesh.n_faces();
  out.side1.resize(static_cast<size_t>(nf) * fg.nq);
  out.side2.resize(static_cast<size_t>(nf) * fg.nq);
  for (int f = 0; f < nf; ++f) {
    const Face& face = mesh.face(f);
    for (int q = 0; q < fg.nq; ++q) {
      const FaceFrame& fr = fg.at(f, q);
      out.side1[f * fg.nq + q] = mesh.element_frame(face.elem1, fr.xi1);
      if (!face.boundary())
        out.side2[f * fg.nq + q] = mesh.element_frame(face.elem2, fr.xi2);
    }
  }
  return out;
}

ClosureEval::ClosureEval(const MomentSources& src, const QuadratureRule2D& vol_rule,
                         const QuadratureRule1D& face_rule)
    : c_(src.closures) {
  if (!c_) return;
  vol_tab_ = tabulate_scalar(c_->space(), vol_rule.points, /*with_grad=*/true);
  face_tab_ = tabulate_scalar_faces(c_->space(), face_rule, /*with_grad=*/true);
}

const ScalarTable& ClosureEval::side_tab(const Face& face, int side) const {
  const int lf = side == 1 ? face.local1 : face.local2;
  const bool flip = side == 1 ? false : !face.aligned;
  return face_tab_.at(lf, flip);
}

SymTensor ClosureEval::combine(const ScalarTable& tab, int e, int q) const {
  const auto& dofs = c_->space().element_dofs(e);
  SymTensor t{};
  for (int i = 0; i < tab.nb; ++i) {
    const double u = tab.v(q, i);
    const int g = dofs[i];
    t.xx += u * c_->txx()[g];
    t.xy += u * c_->txy()[g];
    t.yy += u * c_->tyy()[g];
  }
  return t;
}

Vec2 ClosureEval::combine_div(const ScalarTable& tab, int e, int q,
                              const ElementFrame& frame) const {
  const auto& dofs = c_->space().element_dofs(e);
  Vec2 div{0.0, 0.0};
  for (int i = 0; i < tab.nb; ++i) {
    const Vec2 g = FiniteElementSpace::physical_grad(frame, tab.g(q, i));
    const int gd = dofs[i];
    div.x += g.x * c_->txx()[gd] + g.y * c_->txy()[gd];
    div.y += g.x * c_->txy()[gd] + g.y * c_->tyy()[gd];
  }
  return div;
}

SymTensor ClosureEval::t_vol(int e, int q) const {
  if (!c_) return SymTensor{};
  return combine(vol_tab_, e, q);
}

Vec2 ClosureEval::div_t_vol(int e, int q, const ElementFrame& frame) const {
  if (!c_) return Vec2{0.0, 0.0};
  return combine_div(vol_tab_, e, q, frame);
}

SymTensor ClosureEval::t_face(const Face& face, int side, int q) const {
  if (!c_) return SymTensor{};
  return combine(side_tab(face, side), side == 1 ? face.elem1 : face.elem2, q);
}

Vec2 ClosureEval::div_t_face(const Face& face, int side, int q, const ElementFrame& frame) const {
  if (!c_) return Vec2{0.0, 0.0};
  return combine_div(side_tab(face, side), side == 1 ? face.elem1 : face.elem2, q, frame);
}

double face_penalty(const MomentProblem& prob, const Mesh& mesh, const Face& face) {
  const double pp = (prob.degree + 1.0) * (prob.degree + 1.0);
  const auto one_side = [&](int e) {
    return pp / (prob.sigma_t[e] * std::sqrt(mesh.element_area(e)));
  };
  double k = one_side(face.elem1);
  if (!face.boundary()) k = 0.5 * (k + one_side(face.elem2));
  return prob.penalty_scale * k;
}

double boundary_eb0(const MomentProblem& prob, const Vec2& n) {
  return discrete_eb0(n, prob.quad);
}

}  // namespace detail
}  // namespace smm
