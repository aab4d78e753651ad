#include "smm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "smm/quadrature.hpp"

namespace smm {

namespace {
constexpr double kDedupTol = 1e-12;

struct PointKey {
  long long ix, iy;
  bool operator<(const PointKey& o) const {
    return ix != o.ix ? ix < o.ix : iy < o.iy;
  }
};

// Quantized lookup with neighbor-bucket scan so points within kDedupTol of a
// bucket boundary still merge.
class PointDedup {
 public:
  int insert(const Vec2& p, std::vector<Vec2>& points) {
    const long long ix = llround(p.x / kDedupTol), iy = llround(p.y / kDedupTol);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = map_.find(PointKey{ix + dx, iy + dy});
        if (it != map_.end() && (points[it->second] - p).norm() <= kDedupTol)
          return it->second;
      }
    const int id = static_cast<int>(points.size());
    points.push_back(p);
    map_[PointKey{ix, iy}] = id;
    return id;
  }

 private:
  std::map<PointKey, int> map_;
};
}  // namespace

Mesh::Mesh(int degree)
    : degree_(degree), basis1d_(gauss_lobatto_nodes(degree + 1)) {
  if (degree < 1 || degree > 3)
    throw std::invalid_argument("Mesh: geometric degree must be in [1,3]");
}

Vec2 Mesh::face_point(int lf, double s) {
  switch (lf) {
    case 0: return {s, 0.0};
    case 1: return {1.0, s};
    case 2: return {s, 1.0};
    case 3: return {0.0, s};
  }
  throw std::invalid_argument("face_point: local face out of range");
}

Vec2 Mesh::face_ref_normal(int lf) {
  switch (lf) {
    case 0: return {0.0, -1.0};
    case 1: return {1.0, 0.0};
    case 2: return {0.0, 1.0};
    case 3: return {-1.0, 0.0};
  }
  throw std::invalid_argument("face_ref_normal: local face out of range");
}

Vec2 Mesh::face_ref_tangent(int lf) {
  return (lf == 0 || lf == 2) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
}

Mesh Mesh::cartesian(int nx, int ny, Vec2 lo, Vec2 hi, int geom_degree) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("Mesh::cartesian: empty grid");
  if (hi.x <= lo.x || hi.y <= lo.y)
    throw std::invalid_argument("Mesh::cartesian: degenerate rectangle");
  Mesh mesh(geom_degree);
  const int m = geom_degree;
  const auto lob = gauss_lobatto_nodes(m + 1);
  const double hx = (hi.x - lo.x) / nx, hy = (hi.y - lo.y) / ny;

  // Global lattice of control coordinates; boundary points of adjacent cells
  // evaluate to the same double, so shared ids fall out directly.
  std::vector<double> gx(nx * m + 1), gy(ny * m + 1);
  for (int c = 0; c < nx; ++c)
    for (int k = 0; k <= m; ++k) gx[c * m + k] = lo.x + hx * (c + lob[k]);
  for (int c = 0; c < ny; ++c)
    for (int k = 0; k <= m; ++k) gy[c * m + k] = lo.y + hy * (c + lob[k]);

  mesh.points_.reserve(gx.size() * gy.size());
  for (size_t j = 0; j < gy.size(); ++j)
    for (size_t i = 0; i < gx.size(); ++i) mesh.points_.push_back({gx[i], gy[j]});

  mesh.elems_.resize(static_cast<size_t>(nx) * ny);
  for (int cy = 0; cy < ny; ++cy)
    for (int cx = 0; cx < nx; ++cx) {
      auto& el = mesh.elems_[cy * nx + cx];
      for (int l = 0; l <= m; ++l)
        for (int k = 0; k <= m; ++k)
          el[l * (m + 1) + k] =
              static_cast<int>((cy * m + l) * gx.size() + (cx * m + k));
    }

  mesh.build_connectivity();
  // Domain-side boundary tags.
  for (auto& f : mesh.faces_) {
    if (!f.boundary()) continue;
    const int e = f.elem1, cx = e % nx, cy = e / nx;
    switch (f.local1) {
      case 0: f.boundary_tag = (cy == 0) ? kBottom : -1; break;
      case 1: f.boundary_tag = (cx == nx - 1) ? kRight : -1; break;
      case 2: f.boundary_tag = (cy == ny - 1) ? kTop : -1; break;
      case 3: f.boundary_tag = (cx == 0) ? kLeft : -1; break;
    }
    if (f.boundary_tag < 0)
      throw std::runtime_error("Mesh::cartesian: inconsistent boundary face");
  }
  mesh.compute_areas();
  return mesh;
}

Mesh Mesh::chebyshev(int n_points, Vec2 lo, Vec2 hi) {
  if (n_points < 2) throw std::invalid_argument("Mesh::chebyshev: need >= 2 points");
  Mesh mesh(1);
  const auto t = chebyshev_points(n_points);
  const int n = n_points - 1;  // cells per side
  std::vector<double> gx(t.size()), gy(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    gx[i] = lo.x + (hi.x - lo.x) * t[i];
    gy[i] = lo.y + (hi.y - lo.y) * t[i];
  }
  for (size_t j = 0; j < gy.size(); ++j)
    for (size_t i = 0; i < gx.size(); ++i) mesh.points_.push_back({gx[i], gy[j]});
  mesh.elems_.resize(static_cast<size_t>(n) * n);
  for (int cy = 0; cy < n; ++cy)
    for (int cx = 0; cx < n; ++cx) {
      auto& el = mesh.elems_[cy * n + cx];
      el[0] = cy * n_points + cx;
      el[1] = cy * n_points + cx + 1;
      el[2] = (cy + 1) * n_points + cx;
      el[3] = (cy + 1) * n_points + cx + 1;
    }
  mesh.build_connectivity();
  for (auto& f : mesh.faces_) {
    if (!f.boundary()) continue;
    const int e = f.elem1, cx = e % n, cy = e / n;
    switch (f.local1) {
      case 0: f.boundary_tag = (cy == 0) ? kBottom : -1; break;
      case 1: f.boundary_tag = (cx == n - 1) ? kRight : -1; break;
      case 2: f.boundary_tag = (cy == n - 1) ? kTop : -1; break;
      case 3: f.boundary_tag = (cx == 0) ? kLeft : -1; break;
    }
    if (f.boundary_tag < 0)
      throw std::runtime_error("Mesh::chebyshev: inconsistent boundary face");
  }
  mesh.compute_areas();
  return mesh;
}

std::vector<int> Mesh::face_point_ids(int e, int lf) const {
  const int m = degree_;
  std::vector<int> ids(m + 1);
  const int* ep = element_points(e);
  for (int k = 0; k <= m; ++k) {
    int ix = 0, iy = 0;
    switch (lf) {
      case 0: ix = k; iy = 0; break;
      case 1: ix = m; iy = k; break;
      case 2: ix = k; iy = m; break;
      case 3: ix = 0; iy = k; break;
    }
    ids[k] = ep[iy * (m + 1) + ix];
  }
  return ids;
}

void Mesh::build_connectivity() {
  faces_.clear();
  elem_face_.assign(n_elements(), {-1, -1, -1, -1});
  std::map<std::vector<int>, int> lookup;
  for (int e = 0; e < n_elements(); ++e) {
    for (int lf = 0; lf < 4; ++lf) {
      std::vector<int> ids = face_point_ids(e, lf);
      std::vector<int> key = ids;
      std::sort(key.begin(), key.end());
      auto it = lookup.find(key);
      if (it == lookup.end()) {
        Face f;
        f.elem1 = e;
        f.local1 = lf;
        lookup[key] = static_cast<int>(faces_.size());
        elem_face_[e][lf] = static_cast<int>(faces_.size());
        faces_.push_back(f);
      } else {
        Face& f = faces_[it->second];
        if (f.elem2 >= 0)
          throw std::runtime_error("Mesh: face shared by more than two elements");
        f.elem2 = e;
        f.local2 = lf;
        const std::vector<int> ids1 = face_point_ids(f.elem1, f.local1);
        if (ids == ids1) {
          f.aligned = true;
        } else {
          std::vector<int> rev(ids.rbegin(), ids.rend());
          if (rev != ids1)
            throw std::runtime_error("Mesh: nonconforming shared face");
          f.aligned = false;
        }
        elem_face_[e][lf] = it->second;
      }
    }
  }
}

ElementFrame Mesh::element_frame(int e, const Vec2& xi) const {
  const int m = degree_;
  thread_local std::vector<double> vx, dx, vy, dy;
  basis1d_.eval(xi.x, vx, dx);
  basis1d_.eval(xi.y, vy, dy);
  ElementFrame fr;
  const int* ep = element_points(e);
  for (int l = 0; l <= m; ++l)
    for (int k = 0; k <= m; ++k) {
      const Vec2& p = points_[ep[l * (m + 1) + k]];
      const double v = vx[k] * vy[l];
      const double gx = dx[k] * vy[l], gy = vx[k] * dy[l];
      fr.x += v * p;
      fr.F.a[0][0] += p.x * gx;
      fr.F.a[0][1] += p.x * gy;
      fr.F.a[1][0] += p.y * gx;
      fr.F.a[1][1] += p.y * gy;
    }
  fr.J = fr.F.det();
  if (fr.J <= 0.0)
    throw std::runtime_error("Mesh: non-positive Jacobian in element " + std::to_string(e));
  fr.Finv = fr.F.inverse();
  return fr;
}

ElementFrame2 Mesh::element_frame2(int e, const Vec2& xi) const {
  const int m = degree_;
  thread_local std::vector<double> vx, dx, d2x, vy, dy, d2y;
  basis1d_.eval(xi.x, vx, dx, d2x);
  basis1d_.eval(xi.y, vy, dy, d2y);
  ElementFrame2 fr;
  const int* ep = element_points(e);
  for (int l = 0; l <= m; ++l)
    for (int k = 0; k <= m; ++k) {
      const Vec2& p = points_[ep[l * (m + 1) + k]];
      const double v = vx[k] * vy[l];
      const double gx = dx[k] * vy[l], gy = vx[k] * dy[l];
      const double gxx = d2x[k] * vy[l], gxy = dx[k] * dy[l], gyy = vx[k] * d2y[l];
      fr.x += v * p;
      fr.F.a[0][0] += p.x * gx;
      fr.F.a[0][1] += p.x * gy;
      fr.F.a[1][0] += p.y * gx;
      fr.F.a[1][1] += p.y * gy;
      // dF[n] holds d^2 x_k / (dxi_m dxi_n)
      fr.dF[0].a[0][0] += p.x * gxx;
      fr.dF[0].a[0][1] += p.x * gxy;
      fr.dF[0].a[1][0] += p.y * gxx;
      fr.dF[0].a[1][1] += p.y * gxy;
      fr.dF[1].a[0][0] += p.x * gxy;
      fr.dF[1].a[0][1] += p.x * gyy;
      fr.dF[1].a[1][0] += p.y * gxy;
      fr.dF[1].a[1][1] += p.y * gyy;
    }
  fr.J = fr.F.det();
  if (fr.J <= 0.0)
    throw std::runtime_error("Mesh: non-positive Jacobian in element " + std::to_string(e));
  fr.Finv = fr.F.inverse();
  return fr;
}

FaceFrame Mesh::face_frame(int f, double s) const {
  const Face& fc = faces_[f];
  FaceFrame out;
  out.xi1 = face_point(fc.local1, s);
  const ElementFrame fr = element_frame(fc.elem1, out.xi1);
  out.x = fr.x;
  const Vec2 tangent = fr.F.apply(face_ref_tangent(fc.local1));
  out.dl = tangent.norm();
  // Physical normal direction: adj(F)^T nhat = J F^{-T} nhat; J > 0 keeps the
  // outward sense of side 1.
  const Vec2 nr = face_ref_normal(fc.local1);
  Vec2 n = fr.F.adjugate().apply_T(nr);
  const double len = n.norm();
  if (len <= 0.0) throw std::runtime_error("Mesh: degenerate face tangent");
  out.n = (1.0 / len) * n;
  if (!fc.boundary()) out.xi2 = face_point(fc.local2, fc.aligned ? s : 1.0 - s);
  return out;
}

void Mesh::compute_areas() {
  const QuadratureRule2D rule = make_quadrature_2d(2 * degree_ + 2);
  areas_.assign(n_elements(), 0.0);
  bbox_.assign(n_elements(), {1e300, -1e300, 1e300, -1e300});
  for (int e = 0; e < n_elements(); ++e) {
    for (int q = 0; q < rule.size(); ++q) {
      const ElementFrame fr = element_frame(e, rule.points[q]);
      areas_[e] += rule.weights[q] * fr.J;
    }
    const int* ep = element_points(e);
    for (int i = 0; i < points_per_element(); ++i) {
      const Vec2& p = points_[ep[i]];
      auto& b = bbox_[e];
      b[0] = std::min(b[0], p.x);
      b[1] = std::max(b[1], p.x);
      b[2] = std::min(b[2], p.y);
      b[3] = std::max(b[3], p.y);
    }
  }
}

double Mesh::max_element_h() const {
  double h = 0.0;
  for (int e = 0; e < n_elements(); ++e) h = std::max(h, std::sqrt(areas_[e]));
  return h;
}

void Mesh::validate() const {
  const QuadratureRule2D rule = make_quadrature_2d(2 * degree_ + 2);
  for (int e = 0; e < n_elements(); ++e)
    for (int q = 0; q < rule.size(); ++q)
      element_frame(e, rule.points[q]);  // throws on J <= 0
}

void Mesh::distort_taylor_green(double t_final, int n_steps) {
  for (auto& p : points_) p = advect_taylor_green(p, t_final, n_steps);
  compute_areas();
  validate();
}

Vec2 advect_taylor_green(Vec2 p, double t_final, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("advect_taylor_green: n_steps >= 1");
  const double dt = t_final / n_steps;
  for (int k = 0; k < n_steps; ++k) {
    const Vec2 v{std::sin(p.x) * std::cos(p.y), -std::cos(p.x) * std::sin(p.y)};
    p += dt * v;
  }
  return p;
}

int Mesh::locate(const Vec2& x, Vec2& xi) const {
  const double margin = 1e-8 + 0.1 * max_element_h();
  for (int e = 0; e < n_elements(); ++e) {
    const auto& b = bbox_[e];
    if (x.x < b[0] - margin || x.x > b[1] + margin || x.y < b[2] - margin ||
        x.y > b[3] + margin)
      continue;
    Vec2 t{0.5, 0.5};
    bool ok = false;
    for (int it = 0; it < 50; ++it) {
      const ElementFrame fr = element_frame(e, t);
      const Vec2 r = fr.x - x;
      if (r.norm() < 1e-12) {
        ok = true;
        break;
      }
      Vec2 dxi = fr.Finv.apply(r);
      t -= dxi;
      t.x = std::clamp(t.x, -0.2, 1.2);
      t.y = std::clamp(t.y, -0.2, 1.2);
    }
    if (ok && t.x > -1e-9 && t.x < 1.0 + 1e-9 && t.y > -1e-9 && t.y < 1.0 + 1e-9) {
      xi = {std::clamp(t.x, 0.0, 1.0), std::clamp(t.y, 0.0, 1.0)};
      return e;
    }
  }
  return -1;
}

void Mesh::save(std::ostream& os) const {
  os.precision(17);
  os << "smm-mesh 1\n";
  os << "degree " << degree_ << "\n";
  os << "points " << n_points() << "\n";
  for (const auto& p : points_) os << p.x << " " << p.y << "\n";
  os << "elements " << n_elements() << "\n";
  for (int e = 0; e < n_elements(); ++e) {
    for (int i = 0; i < points_per_element(); ++i)
      os << elems_[e][i] << (i + 1 < points_per_element() ? ' ' : '\n');
  }
  int nb = 0;
  for (const auto& f : faces_)
    if (f.boundary() && f.boundary_tag >= 0) ++nb;
  os << "boundary " << nb << "\n";
  for (const auto& f : faces_)
    if (f.boundary() && f.boundary_tag >= 0)
      os << f.elem1 << " " << f.local1 << " " << f.boundary_tag << "\n";
}

Mesh Mesh::load(std::istream& is) {
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "smm-mesh" || version != 1)
    throw std::runtime_error("Mesh::load: bad header");
  std::string kw;
  int degree = 0;
  is >> kw >> degree;
  if (kw != "degree") throw std::runtime_error("Mesh::load: expected 'degree'");
  Mesh mesh(degree);
  int np = 0;
  is >> kw >> np;
  if (kw != "points" || np < 0) throw std::runtime_error("Mesh::load: expected 'points'");
  mesh.points_.resize(np);
  for (auto& p : mesh.points_) is >> p.x >> p.y;
  int ne = 0;
  is >> kw >> ne;
  if (kw != "elements" || ne < 1)
    throw std::runtime_error("Mesh::load: expected 'elements'");
  mesh.elems_.resize(ne);
  for (auto& el : mesh.elems_)
    for (int i = 0; i < mesh.points_per_element(); ++i) {
      is >> el[i];
      if (el[i] < 0 || el[i] >= np)
        throw std::runtime_error("Mesh::load: point id out of range");
    }
  if (!is) throw std::runtime_error("Mesh::load: truncated file");
  mesh.build_connectivity();
  int nb = 0;
  is >> kw >> nb;
  if (kw != "boundary") throw std::runtime_error("Mesh::load: expected 'boundary'");
  for (int i = 0; i < nb; ++i) {
    int e = 0, lf = 0, tag = 0;
    is >> e >> lf >> tag;
    const int f = mesh.elem_face_.at(e).at(lf);
    if (!mesh.faces_[f].boundary())
      throw std::runtime_error("Mesh::load: tag on interior face");
    mesh.faces_[f].boundary_tag = tag;
  }
  if (!is) throw std::runtime_error("Mesh::load: truncated file");
  mesh.compute_areas();
  mesh.validate();
  return mesh;
}

}  // namespace smm
