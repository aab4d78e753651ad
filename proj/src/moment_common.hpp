#pragma once

// Internal helpers shared by the moment-system assemblers. Not installed.

#include <memory>
#include <vector>

#include "smm/assembly.hpp"
#include "smm/moment_system.hpp"

namespace smm::detail {

/// Element frames of both adjacent elements evaluated at the owner-side face
/// quadrature points (side 2 via the face frame's xi2).
struct FaceSideFrames {
  int nq = 0;
  std::vector<ElementFrame> side1, side2;  // [f*nq + q]; side2 meaningless on boundary
  const ElementFrame& at(int f, int side, int q) const {
    return side == 1 ? side1[f * nq + q] : side2[f * nq + q];
  }
};

FaceSideFrames cache_face_side_frames(const Mesh& mesh, const FaceGeometry& fg);

inline double eval_q0(const MomentSources& src, const Vec2& x) {
  return src.q0 ? src.q0(x) : 0.0;
}
inline Vec2 eval_q1(const MomentSources& src, const Vec2& x) {
  return src.q1 ? src.q1(x) : Vec2{0.0, 0.0};
}
inline double eval_jin(const MomentSources& src, const Vec2& x, const Vec2& n) {
  return src.jin ? src.jin(x, n) : 0.0;
}
inline double eval_beta(const MomentSources& src, int e, const Vec2& xi, const Vec2& n) {
  return src.closures ? src.closures->beta(e, xi, n) : 0.0;
}

/// Tabulated evaluation of the planar correction-tensor components at the
/// quadrature points used by a moment assembler. All evaluators return zero
/// when the source set carries no closure fields (manufactured-source solves).
class ClosureEval {
 public:
  ClosureEval(const MomentSources& src, const QuadratureRule2D& vol_rule,
              const QuadratureRule1D& face_rule);

  bool active() const { return c_ != nullptr; }

  SymTensor t_vol(int e, int q) const;
  Vec2 div_t_vol(int e, int q, const ElementFrame& frame) const;
  /// side is 1 or 2; q indexes the owner-side face rule.
  SymTensor t_face(const Face& face, int side, int q) const;
  Vec2 div_t_face(const Face& face, int side, int q, const ElementFrame& frame) const;

 private:
  const ClosureFields* c_ = nullptr;
  ScalarTable vol_tab_;
  ScalarFaceTables face_tab_;

  const ScalarTable& side_tab(const Face& face, int side) const;
  SymTensor combine(const ScalarTable& tab, int e, int q) const;
  Vec2 combine_div(const ScalarTable& tab, int e, int q, const ElementFrame& frame) const;
};

/// Shared machinery of the two first-order (mixed) discretizations. The
/// normal-continuous and the hybridized broken variant must integrate the
/// same element blocks and the same right-hand side so that their solutions
/// agree to solver tolerance; both delegate here.
struct FirstOrderKit {
  const MomentProblem* prob = nullptr;
  const FiniteElementSpace* yfes = nullptr;  // discontinuous scalar space
  const FiniteElementSpace* vfes = nullptr;  // normal-continuous or broken vector space
  QuadratureRule2D vol_rule;
  QuadratureRule1D face_rule;
  ScalarTable ytab;
  VectorTable vtab;
  VectorFaceTables vftab;
  VolumeGeometry vol_geom;
  FaceGeometry face_geom;
  FaceSideFrames side_frames;

  void init(const MomentProblem& p, const FiniteElementSpace& y, const FiniteElementSpace& v);

  /// Dense element blocks in local dof numbering (row-major, no signs):
  /// mt (nv x nv) includes the boundary-closure face terms of element e,
  /// d is (ny x nv), ma is (ny x ny).
  void element_blocks(int e, std::vector<double>& mt, std::vector<double>& d,
                      std::vector<double>& ma) const;

  /// Right-hand side [b1; b0] (current block first) in global signed dofs.
  Vector assemble_rhs(const MomentSources& src) const;
};

/// Interior-penalty coefficient for a face: penalty_scale times the mean of
/// (p+1)^2 / (sigma_t_K h_K) over the adjacent elements, h_K = sqrt(area).
double face_penalty(const MomentProblem& prob, const Mesh& mesh, const Face& face);

/// E_b0 for the problem's angular quadrature at a unit outward normal.
double boundary_eb0(const MomentProblem& prob, const Vec2& n);

// Concrete system constructors (one per translation unit).
std::unique_ptr<MomentSystem> make_ip_system(const MomentProblem& prob, const MomentOptions& opt);
std::unique_ptr<MomentSystem> make_cg_system(const MomentProblem& prob, const MomentOptions& opt);
std::unique_ptr<MomentSystem> make_rt_system(const MomentProblem& prob, const MomentOptions& opt);
std::unique_ptr<MomentSystem> make_hrt_system(const MomentProblem& prob, const MomentOptions& opt);

}  // namespace smm::detail
