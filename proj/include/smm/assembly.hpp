#pragma once

#include <vector>

#include "smm/fespace.hpp"
#include "smm/mesh.hpp"
#include "smm/quadrature.hpp"
#include "smm/sparse.hpp"

namespace smm {

// Tabulated scalar basis values (and optionally reference gradients) at a
// fixed set of reference points. Storage is point-major: entry q*nb + i.
struct ScalarTable {
  int nb = 0;
  int nq = 0;
  std::vector<double> val;
  std::vector<Vec2> grad;  // empty unless gradients were requested

  double v(int q, int i) const { return val[q * nb + i]; }
  const Vec2& g(int q, int i) const { return grad[q * nb + i]; }
};

// Tabulated vector (Raviart-Thomas style) basis data in reference
// coordinates: values, divergences, and optionally full gradients.
struct VectorTable {
  int nb = 0;
  int nq = 0;
  std::vector<Vec2> val;
  std::vector<double> div;
  std::vector<Mat2> grad;  // empty unless gradients were requested

  const Vec2& v(int q, int i) const { return val[q * nb + i]; }
  double d(int q, int i) const { return div[q * nb + i]; }
  const Mat2& g(int q, int i) const { return grad[q * nb + i]; }
};

ScalarTable tabulate_scalar(const FiniteElementSpace& fes, const std::vector<Vec2>& pts,
                            bool with_grad);
VectorTable tabulate_vector(const FiniteElementSpace& fes, const std::vector<Vec2>& pts,
                            bool with_grad);

// Points on a local face. `flip` reverses the parameterization; the neighbour
// side of a misaligned interior face is tabulated with flip = true so that
// both sides share the owner-side quadrature parameterization.
std::vector<Vec2> face_points(int local_face, const QuadratureRule1D& rule, bool flip);

// Face tables for all four local faces and both orientations.
struct ScalarFaceTables {
  ScalarTable tab[4][2];
  const ScalarTable& at(int lf, bool flip) const { return tab[lf][flip ? 1 : 0]; }
};
struct VectorFaceTables {
  VectorTable tab[4][2];
  const VectorTable& at(int lf, bool flip) const { return tab[lf][flip ? 1 : 0]; }
};

ScalarFaceTables tabulate_scalar_faces(const FiniteElementSpace& fes,
                                       const QuadratureRule1D& rule, bool with_grad);
VectorFaceTables tabulate_vector_faces(const FiniteElementSpace& fes,
                                       const QuadratureRule1D& rule, bool with_grad);

// 1D trace basis values at rule points (no flip: trace functions live in the
// owner-side parameterization of their face).
ScalarTable tabulate_trace(const FiniteElementSpace& fes, const QuadratureRule1D& rule);

// Cached element frames at the points of a 2D rule; entry e*rule.size() + q.
struct VolumeGeometry {
  int nq = 0;
  std::vector<ElementFrame2> frames;
  const ElementFrame2& at(int e, int q) const { return frames[e * nq + q]; }
};
VolumeGeometry cache_volume_geometry(const Mesh& mesh, const QuadratureRule2D& rule);

// Cached face frames at the points of a 1D rule; entry f*rule.size() + q.
// Frames are parameterized by the owner (side-1) face coordinate.
struct FaceGeometry {
  int nq = 0;
  std::vector<FaceFrame> frames;
  const FaceFrame& at(int f, int q) const { return frames[f * nq + q]; }
};
FaceGeometry cache_face_geometry(const Mesh& mesh, const QuadratureRule1D& rule);

// Scatter a dense local block (row-major, rows.size() x cols.size()) into a
// triplet list, applying optional per-dof sign factors (empty = all +1).
void scatter_block(const std::vector<int>& rows, const std::vector<double>& row_signs,
                   const std::vector<int>& cols, const std::vector<double>& col_signs,
                   const std::vector<double>& local, std::vector<Triplet>& out);

}  // namespace smm
