#include "smm/fespace.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "smm/quadrature.hpp"

namespace smm {

namespace {
int nu_sign(int lf) { return (lf == 1 || lf == 2) ? 1 : -1; }

const char* kind_name(SpaceKind k) {
  switch (k) {
    case SpaceKind::DG: return "dg";
    case SpaceKind::CG: return "cg";
    case SpaceKind::RT: return "rt";
    case SpaceKind::BrokenRT: return "brokenrt";
    case SpaceKind::Trace: return "trace";
  }
  return "?";
}
}  // namespace

FiniteElementSpace::FiniteElementSpace(const Mesh& mesh, SpaceKind kind, int degree)
    : mesh_(&mesh), kind_(kind), degree_(degree) {
  if (degree < 0) throw std::invalid_argument("FiniteElementSpace: degree >= 0 required");
  switch (kind) {
    case SpaceKind::DG:
      if (degree < 1) throw std::invalid_argument("DG space requires degree >= 1 here");
      nodes1d_ = std::make_unique<Lagrange1D>(gauss_legendre_nodes(degree + 1));
      build_dg();
      break;
    case SpaceKind::CG:
      if (degree < 1) throw std::invalid_argument("CG space requires degree >= 1");
      nodes1d_ = std::make_unique<Lagrange1D>(gauss_lobatto_nodes(degree + 1));
      build_cg();
      break;
    case SpaceKind::RT:
    case SpaceKind::BrokenRT:
      normal_1d_ = std::make_unique<Lagrange1D>(gauss_lobatto_nodes(degree + 2));
      tangent_1d_ = std::make_unique<Lagrange1D>(gauss_legendre_nodes(degree + 1));
      build_rt(kind == SpaceKind::BrokenRT);
      break;
    case SpaceKind::Trace:
      tangent_1d_ = std::make_unique<Lagrange1D>(gauss_legendre_nodes(degree + 1));
      build_trace();
      break;
  }
}

void FiniteElementSpace::build_dg() {
  const int p = degree_, nb = (p + 1) * (p + 1);
  n_local_ = nb;
  elem_dofs_.resize(mesh_->n_elements());
  elem_signs_.resize(mesh_->n_elements());
  for (int e = 0; e < mesh_->n_elements(); ++e) {
    elem_dofs_[e].resize(nb);
    elem_signs_[e].assign(nb, 1.0);
    for (int i = 0; i < nb; ++i) elem_dofs_[e][i] = e * nb + i;
  }
  n_dofs_ = mesh_->n_elements() * nb;
}

void FiniteElementSpace::build_cg() {
  const int p = degree_, n1 = p + 1;
  const int m = mesh_->geom_degree();
  n_local_ = n1 * n1;
  elem_dofs_.resize(mesh_->n_elements());
  elem_signs_.resize(mesh_->n_elements());

  // Local nodes on each face in face-parameter order (corners included).
  for (int lf = 0; lf < 4; ++lf) {
    face_local_[lf].resize(n1);
    for (int k = 0; k <= p; ++k) {
      int ix = 0, iy = 0;
      switch (lf) {
        case 0: ix = k; iy = 0; break;
        case 1: ix = p; iy = k; break;
        case 2: ix = k; iy = p; break;
        case 3: ix = 0; iy = k; break;
      }
      face_local_[lf][k] = iy * n1 + ix;
    }
  }

  std::map<int, int> vertex_dof;  // corner control point id -> dof
  std::vector<std::vector<int>> edge_dof(mesh_->n_faces());
  int next = 0;
  for (int e = 0; e < mesh_->n_elements(); ++e) {
    elem_dofs_[e].assign(n_local_, -1);
    elem_signs_[e].assign(n_local_, 1.0);
    const int* ep = mesh_->element_points(e);
    for (int iy = 0; iy <= p; ++iy)
      for (int ix = 0; ix <= p; ++ix) {
        const int ld = iy * n1 + ix;
        const bool bx = (ix == 0 || ix == p), by = (iy == 0 || iy == p);
        if (bx && by) {
          const int cp = ep[(iy == 0 ? 0 : m * (m + 1)) + (ix == 0 ? 0 : m)];
          auto it = vertex_dof.find(cp);
          if (it == vertex_dof.end()) it = vertex_dof.emplace(cp, next++).first;
          elem_dofs_[e][ld] = it->second;
        } else if (bx || by) {
          int lf, k;
          if (iy == 0) { lf = 0; k = ix; }
          else if (ix == p) { lf = 1; k = iy; }
          else if (iy == p) { lf = 2; k = ix; }
          else { lf = 3; k = iy; }
          const int f = mesh_->element_face(e, lf);
          const Face& fc = mesh_->face(f);
          auto& slots = edge_dof[f];
          if (slots.empty()) {
            slots.resize(p - 1);
            for (int s = 0; s < p - 1; ++s) slots[s] = next++;
          }
          const bool side1 = (fc.elem1 == e && fc.local1 == lf);
          const int slot = side1 || fc.aligned ? k - 1 : (p - k) - 1;
          elem_dofs_[e][ld] = slots[slot];
        } else {
          elem_dofs_[e][ld] = next++;
        }
      }
  }
  n_dofs_ = next;
}

void FiniteElementSpace::build_rt(bool broken) {
  const int p = degree_;
  const int nx = (p + 2) * (p + 1);  // x-component block size
  n_local_ = 2 * nx;
  elem_dofs_.resize(mesh_->n_elements());
  elem_signs_.resize(mesh_->n_elements());

  // Normal-component dofs per local face, in face-parameter order.
  // x-block local id: i*(p+1) + j  (i: xi Lobatto 0..p+1; j: eta Gauss 0..p)
  // y-block local id: nx + j*(p+1) + i  (j: eta Lobatto 0..p+1; i: xi Gauss)
  for (int k = 0; k <= p; ++k) {
    face_local_[0].push_back(nx + 0 * (p + 1) + k);
    face_local_[1].push_back((p + 1) * (p + 1) + k);
    face_local_[2].push_back(nx + (p + 1) * (p + 1) + k);
    face_local_[3].push_back(0 * (p + 1) + k);
  }

  std::vector<std::vector<int>> face_slots(mesh_->n_faces());
  std::vector<std::pair<int, int>> local_face_of(n_local_, {-1, -1});  // (lf, k)
  for (int lf = 0; lf < 4; ++lf)
    for (int k = 0; k <= p; ++k) local_face_of[face_local_[lf][k]] = {lf, k};

  int next = 0;
  for (int e = 0; e < mesh_->n_elements(); ++e) {
    elem_dofs_[e].assign(n_local_, -1);
    elem_signs_[e].assign(n_local_, 1.0);
    for (int ld = 0; ld < n_local_; ++ld) {
      const auto [lf, k] = local_face_of[ld];
      if (lf < 0 || broken) {
        elem_dofs_[e][ld] = next++;
        continue;
      }
      const int f = mesh_->element_face(e, lf);
      const Face& fc = mesh_->face(f);
      if (fc.boundary()) {
        elem_dofs_[e][ld] = next++;
        continue;
      }
      auto& slots = face_slots[f];
      if (slots.empty()) {
        slots.resize(p + 1);
        for (int s = 0; s <= p; ++s) slots[s] = next++;
      }
      const bool side1 = (fc.elem1 == e && fc.local1 == lf);
      const int slot = side1 || fc.aligned ? k : p - k;
      elem_dofs_[e][ld] = slots[slot];
      // Global value is vhat.nhat in side-1's outward sense; Gauss nodal
      // coefficients pick up the component sign of each side.
      elem_signs_[e][ld] = side1 ? nu_sign(lf) : -nu_sign(lf);
    }
  }
  n_dofs_ = next;
}

void FiniteElementSpace::build_trace() {
  const int p = degree_;
  n_local_ = 0;
  elem_dofs_.resize(mesh_->n_elements());
  elem_signs_.resize(mesh_->n_elements());
  face_dofs_.resize(mesh_->n_faces());
  int next = 0;
  for (int f = 0; f < mesh_->n_faces(); ++f) {
    if (mesh_->face(f).boundary()) continue;
    face_dofs_[f].resize(p + 1);
    for (int k = 0; k <= p; ++k) face_dofs_[f][k] = next++;
  }
  n_dofs_ = next;
}

const std::vector<int>& FiniteElementSpace::face_dofs(int f) const {
  if (kind_ != SpaceKind::Trace)
    throw std::logic_error("face_dofs: only defined for the trace space");
  return face_dofs_[f];
}

void FiniteElementSpace::eval_scalar(const Vec2& xi, std::vector<double>& val) const {
  if (!nodes1d_) throw std::logic_error("eval_scalar: not a scalar space");
  const int n1 = degree_ + 1;
  thread_local std::vector<double> vx, vy;
  nodes1d_->eval(xi.x, vx);
  nodes1d_->eval(xi.y, vy);
  val.resize(n1 * n1);
  for (int iy = 0; iy < n1; ++iy)
    for (int ix = 0; ix < n1; ++ix) val[iy * n1 + ix] = vx[ix] * vy[iy];
}

void FiniteElementSpace::eval_scalar(const Vec2& xi, std::vector<double>& val,
                                     std::vector<Vec2>& grad_ref) const {
  if (!nodes1d_) throw std::logic_error("eval_scalar: not a scalar space");
  const int n1 = degree_ + 1;
  thread_local std::vector<double> vx, vy, dx, dy;
  nodes1d_->eval(xi.x, vx, dx);
  nodes1d_->eval(xi.y, vy, dy);
  val.resize(n1 * n1);
  grad_ref.resize(n1 * n1);
  for (int iy = 0; iy < n1; ++iy)
    for (int ix = 0; ix < n1; ++ix) {
      val[iy * n1 + ix] = vx[ix] * vy[iy];
      grad_ref[iy * n1 + ix] = {dx[ix] * vy[iy], vx[ix] * dy[iy]};
    }
}

void FiniteElementSpace::eval_vector(const Vec2& xi, std::vector<Vec2>& val) const {
  if (!vector_valued()) throw std::logic_error("eval_vector: not an RT space");
  const int p = degree_, nx = (p + 2) * (p + 1);
  thread_local std::vector<double> lx, ly, gx, gy;
  normal_1d_->eval(xi.x, lx);
  normal_1d_->eval(xi.y, ly);
  tangent_1d_->eval(xi.x, gx);
  tangent_1d_->eval(xi.y, gy);
  val.assign(2 * nx, Vec2{});
  for (int i = 0; i <= p + 1; ++i)
    for (int j = 0; j <= p; ++j) {
      val[i * (p + 1) + j] = {lx[i] * gy[j], 0.0};
      val[nx + i * (p + 1) + j] = {0.0, gx[j] * ly[i]};
    }
}

void FiniteElementSpace::eval_vector(const Vec2& xi, std::vector<Vec2>& val,
                                     std::vector<double>& div_ref,
                                     std::vector<Mat2>& grad_ref) const {
  if (!vector_valued()) throw std::logic_error("eval_vector: not an RT space");
  const int p = degree_, nx = (p + 2) * (p + 1);
  thread_local std::vector<double> lx, ly, gx, gy, dlx, dly, dgx, dgy;
  normal_1d_->eval(xi.x, lx, dlx);
  normal_1d_->eval(xi.y, ly, dly);
  tangent_1d_->eval(xi.x, gx, dgx);
  tangent_1d_->eval(xi.y, gy, dgy);
  val.assign(2 * nx, Vec2{});
  div_ref.assign(2 * nx, 0.0);
  grad_ref.assign(2 * nx, Mat2{});
  for (int i = 0; i <= p + 1; ++i)
    for (int j = 0; j <= p; ++j) {
      const int idx = i * (p + 1) + j;
      val[idx] = {lx[i] * gy[j], 0.0};
      div_ref[idx] = dlx[i] * gy[j];
      grad_ref[idx] = Mat2{dlx[i] * gy[j], lx[i] * dgy[j], 0.0, 0.0};
      const int idy = nx + i * (p + 1) + j;
      val[idy] = {0.0, gx[j] * ly[i]};
      div_ref[idy] = gx[j] * dly[i];
      grad_ref[idy] = Mat2{0.0, 0.0, dgx[j] * ly[i], gx[j] * dly[i]};
    }
}

void FiniteElementSpace::eval_trace(double s, std::vector<double>& val) const {
  if (kind_ != SpaceKind::Trace) throw std::logic_error("eval_trace: not a trace space");
  tangent_1d_->eval(s, val);
}

Mat2 FiniteElementSpace::piola_grad(const ElementFrame2& fr, const Vec2& vhat,
                                    const Mat2& grad_ref) {
  const Vec2 Fv = fr.F.apply(vhat);
  Mat2 B;
  for (int n = 0; n < 2; ++n) {
    const Vec2 col = (1.0 / fr.J) * fr.dF[n].adjugate().apply(Fv);
    B.a[0][n] = col.x;
    B.a[1][n] = col.y;
  }
  return (fr.F * (grad_ref - B) * fr.Finv) * (1.0 / fr.J);
}

double eval_scalar(const GridFunction& u, int e, const Vec2& xi) {
  thread_local std::vector<double> val;
  u.space->eval_scalar(xi, val);
  const auto& dofs = u.space->element_dofs(e);
  double s = 0.0;
  for (size_t i = 0; i < dofs.size(); ++i) s += u.coeff[dofs[i]] * val[i];
  return s;
}

Vec2 eval_scalar_grad(const GridFunction& u, int e, const ElementFrame& fr, const Vec2& xi) {
  thread_local std::vector<double> val;
  thread_local std::vector<Vec2> grad;
  u.space->eval_scalar(xi, val, grad);
  const auto& dofs = u.space->element_dofs(e);
  Vec2 g;
  for (size_t i = 0; i < dofs.size(); ++i) g += u.coeff[dofs[i]] * grad[i];
  return FiniteElementSpace::physical_grad(fr, g);
}

Vec2 eval_vector(const GridFunction& u, int e, const ElementFrame& fr, const Vec2& xi) {
  thread_local std::vector<Vec2> val;
  u.space->eval_vector(xi, val);
  const auto& dofs = u.space->element_dofs(e);
  const auto& sg = u.space->element_signs(e);
  Vec2 v;
  for (size_t i = 0; i < dofs.size(); ++i) v += (u.coeff[dofs[i]] * sg[i]) * val[i];
  return FiniteElementSpace::piola_value(fr, v);
}

double eval_vector_div(const GridFunction& u, int e, const ElementFrame& fr, const Vec2& xi) {
  thread_local std::vector<Vec2> val;
  thread_local std::vector<double> div;
  thread_local std::vector<Mat2> grad;
  u.space->eval_vector(xi, val, div, grad);
  const auto& dofs = u.space->element_dofs(e);
  const auto& sg = u.space->element_signs(e);
  double d = 0.0;
  for (size_t i = 0; i < dofs.size(); ++i) d += u.coeff[dofs[i]] * sg[i] * div[i];
  return FiniteElementSpace::piola_div(fr, d);
}

double eval_scalar_at(const GridFunction& u, const Vec2& x) {
  Vec2 xi;
  const int e = u.space->mesh().locate(x, xi);
  if (e < 0) throw std::runtime_error("eval_scalar_at: point outside mesh");
  return eval_scalar(u, e, xi);
}

namespace {

GridFunction project_impl(const FiniteElementSpace& space,
                          const std::function<double(Vec2)>* fs,
                          const std::function<Vec2(Vec2)>* fv) {
  const Mesh& mesh = space.mesh();
  const int order = 2 * space.degree() + 2 * mesh.geom_degree() + 4;
  const QuadratureRule2D rule = make_quadrature_2d(order);
  const int nl = space.n_local_dofs();
  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.n_dofs());
  std::vector<double> sval;
  std::vector<Vec2> vval;
  Eigen::MatrixXd M(nl, nl);
  Eigen::VectorXd b(nl);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    M.setZero();
    b.setZero();
    for (int q = 0; q < rule.size(); ++q) {
      const ElementFrame fr = mesh.element_frame(e, rule.points[q]);
      const double w = rule.weights[q] * fr.J;
      if (fs) {
        space.eval_scalar(rule.points[q], sval);
        const double fx = (*fs)(fr.x);
        for (int i = 0; i < nl; ++i) {
          b(i) += w * fx * sval[i];
          for (int j = 0; j < nl; ++j) M(i, j) += w * sval[i] * sval[j];
        }
      } else {
        space.eval_vector(rule.points[q], vval);
        const Vec2 fx = (*fv)(fr.x);
        thread_local std::vector<Vec2> phys;
        phys.resize(nl);
        for (int i = 0; i < nl; ++i) phys[i] = FiniteElementSpace::piola_value(fr, vval[i]);
        for (int i = 0; i < nl; ++i) {
          b(i) += w * fx.dot(phys[i]);
          for (int j = 0; j < nl; ++j) M(i, j) += w * phys[i].dot(phys[j]);
        }
      }
    }
    const auto& dofs = space.element_dofs(e);
    const auto& sg = space.element_signs(e);
    for (int i = 0; i < nl; ++i) {
      rhs(dofs[i]) += sg[i] * b(i);
      for (int j = 0; j < nl; ++j)
        trips.emplace_back(dofs[i], dofs[j], sg[i] * sg[j] * M(i, j));
    }
  }
  Eigen::SparseMatrix<double> A(space.n_dofs(), space.n_dofs());
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(A);
  if (chol.info() != Eigen::Success)
    throw std::runtime_error("l2_project: mass factorization failed");
  const Eigen::VectorXd x = chol.solve(rhs);
  GridFunction g(space);
  for (int i = 0; i < space.n_dofs(); ++i) g.coeff[i] = x(i);
  return g;
}

}  // namespace

GridFunction l2_project(const FiniteElementSpace& space, const std::function<double(Vec2)>& f) {
  if (space.vector_valued() || space.kind() == SpaceKind::Trace)
    throw std::invalid_argument("l2_project: scalar space required");
  return project_impl(space, &f, nullptr);
}

GridFunction l2_project_vector(const FiniteElementSpace& space,
                               const std::function<Vec2(Vec2)>& f) {
  if (!space.vector_valued())
    throw std::invalid_argument("l2_project_vector: RT space required");
  return project_impl(space, nullptr, &f);
}

double l2_error(const GridFunction& u, const std::function<double(Vec2)>& f, int extra_order) {
  const FiniteElementSpace& space = *u.space;
  const Mesh& mesh = space.mesh();
  const QuadratureRule2D rule =
      make_quadrature_2d(2 * space.degree() + 2 * mesh.geom_degree() + extra_order);
  double err2 = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e)
    for (int q = 0; q < rule.size(); ++q) {
      const ElementFrame fr = mesh.element_frame(e, rule.points[q]);
      const double d = eval_scalar(u, e, rule.points[q]) - f(fr.x);
      err2 += rule.weights[q] * fr.J * d * d;
    }
  return std::sqrt(err2);
}

double l2_error_vector(const GridFunction& u, const std::function<Vec2(Vec2)>& f,
                       int extra_order) {
  const FiniteElementSpace& space = *u.space;
  const Mesh& mesh = space.mesh();
  const QuadratureRule2D rule =
      make_quadrature_2d(2 * space.degree() + 2 * mesh.geom_degree() + extra_order);
  double err2 = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e)
    for (int q = 0; q < rule.size(); ++q) {
      const ElementFrame fr = mesh.element_frame(e, rule.points[q]);
      const Vec2 d = eval_vector(u, e, fr, rule.points[q]) - f(fr.x);
      err2 += rule.weights[q] * fr.J * d.dot(d);
    }
  return std::sqrt(err2);
}

double l2_norm(const GridFunction& u) {
  if (u.space->vector_valued())
    return l2_error_vector(u, [](Vec2) { return Vec2{0.0, 0.0}; });
  return l2_error(u, [](Vec2) { return 0.0; });
}

void GridFunction::save(std::ostream& os) const {
  os.precision(17);
  os << "smm-gridfunction 1\n";
  os << kind_name(space->kind()) << " " << space->degree() << " " << space->n_dofs() << "\n";
  for (double c : coeff) os << c << "\n";
}

GridFunction GridFunction::load(std::istream& is, const FiniteElementSpace& s) {
  std::string magic, kind;
  int version = 0, degree = 0, n = 0;
  is >> magic >> version >> kind >> degree >> n;
  if (magic != "smm-gridfunction" || version != 1)
    throw std::runtime_error("GridFunction::load: bad header");
  if (kind != kind_name(s.kind()) || degree != s.degree() || n != s.n_dofs())
    throw std::runtime_error("GridFunction::load: space mismatch");
  GridFunction g(s);
  for (int i = 0; i < n; ++i) is >> g.coeff[i];
  if (!is) throw std::runtime_error("GridFunction::load: truncated file");
  return g;
}

}  // namespace smm
