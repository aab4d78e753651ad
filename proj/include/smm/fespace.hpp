#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "smm/geom.hpp"
#include "smm/lagrange.hpp"
#include "smm/mesh.hpp"

namespace smm {

enum class SpaceKind {
  DG,        // discontinuous tensor Lagrange on Gauss-Legendre nodes
  CG,        // continuous tensor Lagrange on Gauss-Lobatto nodes
  RT,        // Raviart-Thomas Q_{p+1,p} x Q_{p,p+1}, shared normal components
  BrokenRT,  // same local space, all unknowns element-local
  Trace      // degree-p polynomials on interior faces (hybridization multiplier)
};

/// Finite element space on a Mesh. Scalar kinds evaluate through the
/// reference map by composition; vector kinds through the contravariant Piola
/// map v = (1/J) F vhat, which preserves normal components across faces.
///
/// Element dof maps carry a sign so that shared RT normal unknowns have a
/// single global orientation (the face's elem1->elem2 normal); expanding a
/// field always reads coeff[dof] * sign * basis.
class FiniteElementSpace {
 public:
  FiniteElementSpace(const Mesh& mesh, SpaceKind kind, int degree);

  const Mesh& mesh() const { return *mesh_; }
  SpaceKind kind() const { return kind_; }
  int degree() const { return degree_; }
  int n_dofs() const { return n_dofs_; }
  int n_local_dofs() const { return n_local_; }
  bool vector_valued() const { return kind_ == SpaceKind::RT || kind_ == SpaceKind::BrokenRT; }

  const std::vector<int>& element_dofs(int e) const { return elem_dofs_[e]; }
  const std::vector<double>& element_signs(int e) const { return elem_signs_[e]; }

  /// Trace space only: global dofs of an interior face (slot order follows
  /// the side-1 face parameterization).
  const std::vector<int>& face_dofs(int f) const;

  /// Local dof ids lying on local face lf, ordered by the face parameter of
  /// that element's side (slot k sits at the k-th 1D node). Scalar spaces:
  /// p+1 nodes; RT kinds: the p+1 normal-component dofs. DG/Trace: empty.
  const std::vector<int>& local_face_dofs(int lf) const { return face_local_[lf]; }

  // -- reference basis evaluation (scalar kinds) --
  void eval_scalar(const Vec2& xi, std::vector<double>& val) const;
  void eval_scalar(const Vec2& xi, std::vector<double>& val, std::vector<Vec2>& grad_ref) const;

  // -- reference basis evaluation (RT kinds) --
  void eval_vector(const Vec2& xi, std::vector<Vec2>& val) const;
  void eval_vector(const Vec2& xi, std::vector<Vec2>& val, std::vector<double>& div_ref,
                   std::vector<Mat2>& grad_ref) const;

  // -- trace basis on a face coordinate --
  void eval_trace(double s, std::vector<double>& val) const;

  // physical transforms
  static Vec2 physical_grad(const ElementFrame& fr, const Vec2& grad_ref) {
    return fr.Finv.apply_T(grad_ref);
  }
  static Vec2 piola_value(const ElementFrame& fr, const Vec2& vhat) {
    return (1.0 / fr.J) * fr.F.apply(vhat);
  }
  static double piola_div(const ElementFrame& fr, double div_ref) {
    return div_ref / fr.J;
  }
  /// Full physical gradient of a Piola-mapped field on a (possibly curved)
  /// element: grad v = (1/J) F (grad_ref - B) Finv with
  /// B(:,n) = (1/J) adj(dF_n) (F vhat); B vanishes on affine elements and is
  /// trace-free by the Piola identity.
  static Mat2 piola_grad(const ElementFrame2& fr, const Vec2& vhat, const Mat2& grad_ref);

 private:
  void build_dg();
  void build_cg();
  void build_rt(bool broken);
  void build_trace();

  const Mesh* mesh_;
  SpaceKind kind_;
  int degree_;
  int n_dofs_ = 0;
  int n_local_ = 0;
  std::vector<std::vector<int>> elem_dofs_;
  std::vector<std::vector<double>> elem_signs_;
  std::vector<std::vector<int>> face_dofs_;   // Trace only
  std::vector<int> face_local_[4];
  // 1D factors: scalar kinds use nodes1d_; RT uses normal_1d_ (Lobatto p+2)
  // and tangent_1d_ (Gauss p+1); Trace uses tangent_1d_.
  std::unique_ptr<Lagrange1D> nodes1d_;
  std::unique_ptr<Lagrange1D> normal_1d_;
  std::unique_ptr<Lagrange1D> tangent_1d_;
};

/// Coefficients of a discrete field in a FiniteElementSpace.
struct GridFunction {
  const FiniteElementSpace* space = nullptr;
  std::vector<double> coeff;

  GridFunction() = default;
  explicit GridFunction(const FiniteElementSpace& s)
      : space(&s), coeff(s.n_dofs(), 0.0) {}

  void save(std::ostream& os) const;
  /// Loads coefficients saved by save(); the space must match the recorded
  /// kind/degree/size.
  static GridFunction load(std::istream& is, const FiniteElementSpace& s);
};

/// Evaluate a scalar GridFunction at a reference point of element e.
double eval_scalar(const GridFunction& u, int e, const Vec2& xi);
/// Physical gradient at a reference point (frame must belong to (e, xi)).
Vec2 eval_scalar_grad(const GridFunction& u, int e, const ElementFrame& fr, const Vec2& xi);
/// Piola-mapped vector value / divergence for RT kinds.
Vec2 eval_vector(const GridFunction& u, int e, const ElementFrame& fr, const Vec2& xi);
double eval_vector_div(const GridFunction& u, int e, const ElementFrame& fr, const Vec2& xi);

/// Evaluate a scalar GridFunction at a physical point (mesh point location);
/// throws if the point is outside the mesh.
double eval_scalar_at(const GridFunction& u, const Vec2& x);

/// Global L2 projection of an analytic function (mass matrix solve; block
/// diagonal for discontinuous kinds, global for CG/RT).
GridFunction l2_project(const FiniteElementSpace& space, const std::function<double(Vec2)>& f);
GridFunction l2_project_vector(const FiniteElementSpace& space, const std::function<Vec2(Vec2)>& f);

/// L2 norms / errors by quadrature of order 2p + 2m + extra.
double l2_error(const GridFunction& u, const std::function<double(Vec2)>& f, int extra_order = 6);
double l2_error_vector(const GridFunction& u, const std::function<Vec2(Vec2)>& f, int extra_order = 6);
double l2_norm(const GridFunction& u);

}  // namespace smm
