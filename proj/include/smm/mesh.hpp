#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "smm/geom.hpp"
#include "smm/lagrange.hpp"

namespace smm {

/// Mesh face (an edge in 2D). `elem2 < 0` marks a boundary face. The face
/// normal convention everywhere in this code: n points from elem1 into elem2;
/// on the boundary it is the outward normal of elem1.
struct Face {
  int elem1 = -1, elem2 = -1;
  int local1 = -1, local2 = -1;  // local face index (0..3) within each element
  bool aligned = true;           // side-2 parameterization runs with side-1's
  int boundary_tag = -1;         // generator tag for boundary faces, else -1
  bool boundary() const { return elem2 < 0; }
};

/// Map data at a reference point: x = T(xi), F = dT/dxi (columns are
/// derivatives w.r.t. xi and eta), J = det F > 0.
struct ElementFrame {
  Vec2 x;
  Mat2 F;
  Mat2 Finv;
  double J = 0.0;
};

/// ElementFrame plus map second derivatives dF[n] = dF/dxi_n, needed for the
/// gradient of Piola-mapped vector fields on curved elements.
struct ElementFrame2 : ElementFrame {
  Mat2 dF[2];
};

/// Face data at a face coordinate s in [0,1] (side-1 parameterization):
/// physical point, unit normal (elem1 -> elem2), arc-length factor dl such
/// that integrals are sum_q w_q f(s_q) dl(s_q), and the volume reference
/// coordinates of the point within each adjacent element.
struct FaceFrame {
  Vec2 x;
  Vec2 n;
  double dl = 0.0;
  Vec2 xi1;
  Vec2 xi2;  // valid only for interior faces
};

/// Boundary tags assigned by the generators.
enum BoundaryTag : int { kBottom = 0, kRight = 1, kTop = 2, kLeft = 3 };

/// Mesh of curvilinear quadrilaterals. The geometry of element K is
/// x(xi) = sum_i P_{K,i} l_i(xi) with l_i the tensor Lagrange basis on
/// Gauss-Lobatto points of the geometric degree; control points shared
/// between elements are stored once.
class Mesh {
 public:
  /// nx-by-ny grid of elements on the axis-aligned rectangle [lo, hi].
  static Mesh cartesian(int nx, int ny, Vec2 lo, Vec2 hi, int geom_degree = 1);

  /// Tensor mesh whose (n_points) grid lines follow the Chebyshev
  /// distribution on each axis of [lo, hi]; straight-sided (degree 1).
  static Mesh chebyshev(int n_points, Vec2 lo, Vec2 hi);

  /// Advect every control point with the steady vortex
  /// v = (sin x cos y, -cos x sin y) using forward Euler. Throws if any
  /// element Jacobian becomes non-positive.
  void distort_taylor_green(double t_final, int n_steps);

  int geom_degree() const { return degree_; }
  int n_points() const { return static_cast<int>(points_.size()); }
  int n_elements() const { return static_cast<int>(elems_.size()); }
  int n_faces() const { return static_cast<int>(faces_.size()); }

  const Vec2& point(int i) const { return points_[i]; }
  const Face& face(int f) const { return faces_[f]; }
  const std::vector<Face>& faces() const { return faces_; }
  /// Control point ids of element e, tensor-ordered (xi fastest).
  const int* element_points(int e) const { return elems_[e].data(); }
  int points_per_element() const { return (degree_ + 1) * (degree_ + 1); }
  /// Face id of local face lf of element e.
  int element_face(int e, int lf) const { return elem_face_[e][lf]; }

  ElementFrame element_frame(int e, const Vec2& xi) const;
  ElementFrame2 element_frame2(int e, const Vec2& xi) const;
  FaceFrame face_frame(int f, double s) const;

  double element_area(int e) const { return areas_[e]; }
  /// max over elements of sqrt(area): the mesh size used in reports.
  double max_element_h() const;

  /// Sample det F at quadrature points of order 2*degree+2 in every element
  /// and throw if any value is <= 0 (inverted or degenerate geometry).
  void validate() const;

  /// Locate a physical point: returns element id and fills xi; -1 if the
  /// point is in no element (to tolerance).
  int locate(const Vec2& x, Vec2& xi) const;

  /// Plain-text round-trippable format.
  void save(std::ostream& os) const;
  static Mesh load(std::istream& is);

  /// Reference-square face parameterizations (local faces: 0 bottom, 1 right,
  /// 2 top, 3 left; s in [0,1]).
  static Vec2 face_point(int lf, double s);
  static Vec2 face_ref_normal(int lf);
  static Vec2 face_ref_tangent(int lf);

 private:
  Mesh(int degree);
  void build_connectivity();
  void compute_areas();
  std::vector<int> face_point_ids(int e, int lf) const;

  int degree_;
  Lagrange1D basis1d_;
  std::vector<Vec2> points_;
  std::vector<std::array<int, 16>> elems_;  // up to degree 3 inline
  std::vector<Face> faces_;
  std::vector<std::array<int, 4>> elem_face_;
  std::vector<double> areas_;
  std::vector<std::array<double, 4>> bbox_;  // xmin xmax ymin ymax per element
};

/// One forward-Euler advection of a point with the Taylor-Green vortex field;
/// exposed for oracle tests of the mesh distortion.
Vec2 advect_taylor_green(Vec2 p, double t_final, int n_steps);

}  // namespace smm
