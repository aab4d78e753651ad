#include "smm/assembly.hpp"

#include <stdexcept>

namespace smm {

ScalarTable tabulate_scalar(const FiniteElementSpace& fes, const std::vector<Vec2>& pts,
                            bool with_grad) {
  ScalarTable t;
  t.nb = fes.n_local_dofs();
  t.nq = static_cast<int>(pts.size());
  t.val.resize(static_cast<std::size_t>(t.nb) * t.nq);
  if (with_grad) t.grad.resize(static_cast<std::size_t>(t.nb) * t.nq);
  std::vector<double> v(t.nb);
  std::vector<Vec2> g(t.nb);
  for (int q = 0; q < t.nq; ++q) {
    if (with_grad)
      fes.eval_scalar(pts[q], v, g);
    else
      fes.eval_scalar(pts[q], v);
    for (int i = 0; i < t.nb; ++i) {
      t.val[q * t.nb + i] = v[i];
      if (with_grad) t.grad[q * t.nb + i] = g[i];
    }
  }
  return t;
}

VectorTable tabulate_vector(const FiniteElementSpace& fes, const std::vector<Vec2>& pts,
                            bool with_grad) {
  VectorTable t;
  t.nb = fes.n_local_dofs();
  t.nq = static_cast<int>(pts.size());
  t.val.resize(static_cast<std::size_t>(t.nb) * t.nq);
  t.div.resize(static_cast<std::size_t>(t.nb) * t.nq);
  if (with_grad) t.grad.resize(static_cast<std::size_t>(t.nb) * t.nq);
  std::vector<Vec2> v(t.nb);
  std::vector<double> d(t.nb);
  std::vector<Mat2> g(t.nb);
  for (int q = 0; q < t.nq; ++q) {
    fes.eval_vector(pts[q], v, d, g);
    for (int i = 0; i < t.nb; ++i) {
      t.val[q * t.nb + i] = v[i];
      t.div[q * t.nb + i] = d[i];
      if (with_grad) t.grad[q * t.nb + i] = g[i];
    }
  }
  return t;
}

std::vector<Vec2> face_points(int local_face, const QuadratureRule1D& rule, bool flip) {
  std::vector<Vec2> pts(rule.size());
  for (int q = 0; q < static_cast<int>(rule.size()); ++q) {
    const double s = flip ? 1.0 - rule.points[q] : rule.points[q];
    pts[q] = Mesh::face_point(local_face, s);
  }
  return pts;
}

ScalarFaceTables tabulate_scalar_faces(const FiniteElementSpace& fes,
                                       const QuadratureRule1D& rule, bool with_grad) {
  ScalarFaceTables t;
  for (int lf = 0; lf < 4; ++lf)
    for (int flip = 0; flip < 2; ++flip)
      t.tab[lf][flip] = tabulate_scalar(fes, face_points(lf, rule, flip != 0), with_grad);
  return t;
}

VectorFaceTables tabulate_vector_faces(const FiniteElementSpace& fes,
                                       const QuadratureRule1D& rule, bool with_grad) {
  VectorFaceTables t;
  for (int lf = 0; lf < 4; ++lf)
    for (int flip = 0; flip < 2; ++flip)
      t.tab[lf][flip] = tabulate_vector(fes, face_points(lf, rule, flip != 0), with_grad);
  return t;
}

ScalarTable tabulate_trace(const FiniteElementSpace& fes, const QuadratureRule1D& rule) {
  ScalarTable t;
  t.nb = fes.degree() + 1;
  t.nq = static_cast<int>(rule.size());
  t.val.resize(static_cast<std::size_t>(t.nb) * t.nq);
  std::vector<double> v(t.nb);
  for (int q = 0; q < t.nq; ++q) {
    fes.eval_trace(rule.points[q], v);
    for (int i = 0; i < t.nb; ++i) t.val[q * t.nb + i] = v[i];
  }
  return t;
}

VolumeGeometry cache_volume_geometry(const Mesh& mesh, const QuadratureRule2D& rule) {
  VolumeGeometry g;
  g.nq = static_cast<int>(rule.size());
  g.frames.resize(static_cast<std::size_t>(mesh.n_elements()) * g.nq);
  for (int e = 0; e < mesh.n_elements(); ++e)
    for (int q = 0; q < g.nq; ++q) g.frames[e * g.nq + q] = mesh.element_frame2(e, rule.points[q]);
  return g;
}

FaceGeometry cache_face_geometry(const Mesh& mesh, const QuadratureRule1D& rule) {
  FaceGeometry g;
  g.nq = static_cast<int>(rule.size());
  g.frames.resize(static_cast<std::size_t>(mesh.n_faces()) * g.nq);
  for (int f = 0; f < mesh.n_faces(); ++f)
    for (int q = 0; q < g.nq; ++q) g.frames[f * g.nq + q] = mesh.face_frame(f, rule.points[q]);
  return g;
}

void scatter_block(const std::vector<int>& rows, const std::vector<double>& row_signs,
                   const std::vector<int>& cols, const std::vector<double>& col_signs,
                   const std::vector<double>& local, std::vector<Triplet>& out) {
  const int nr = static_cast<int>(rows.size());
  const int nc = static_cast<int>(cols.size());
  if (local.size() != static_cast<std::size_t>(nr) * nc)
    throw std::invalid_argument("scatter_block: size mismatch");
  for (int i = 0; i < nr; ++i) {
    const double rs = row_signs.empty() ? 1.0 : row_signs[i];
    for (int j = 0; j < nc; ++j) {
      const double cs = col_signs.empty() ? 1.0 : col_signs[j];
      const double v = rs * cs * local[i * nc + j];
      if (v != 0.0) out.push_back({rows[i], cols[j], v});
    }
  }
}

}  // namespace smm
