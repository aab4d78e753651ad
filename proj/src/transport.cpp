#include "smm/transport.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace smm {

void TransportProblem::validate() const {
  if (!mesh) throw std::invalid_argument("transport problem: no mesh");
  if (degree < 1) throw std::invalid_argument("transport problem: degree must be >= 1");
  if (quad.size() == 0) throw std::invalid_argument("transport problem: empty angular quadrature");
  const std::size_t ne = static_cast<std::size_t>(mesh->n_elements());
  if (sigma_t.size() != ne || sigma_s.size() != ne)
    throw std::invalid_argument("transport problem: cross-section arrays must be per element");
  for (std::size_t e = 0; e < ne; ++e) {
    if (!(sigma_s[e] >= 0.0) || !(sigma_t[e] >= sigma_s[e]))
      throw std::invalid_argument("transport problem: need 0 <= sigma_s <= sigma_t");
  }
}

Moments angular_moments(const AngularFlux& flux, const AngularQuadrature& quad) {
  if (flux.n_directions() != quad.size())
    throw std::invalid_argument("angular_moments: direction count mismatch");
  const int n = flux.space->n_dofs();
  Moments m;
  m.phi.assign(n, 0.0);
  m.jx.assign(n, 0.0);
  m.jy.assign(n, 0.0);
  m.pxx.assign(n, 0.0);
  m.pxy.assign(n, 0.0);
  m.pyy.assign(n, 0.0);
  m.pzz.assign(n, 0.0);
  for (int d = 0; d < quad.size(); ++d) {
    const Direction& o = quad[d];
    const Vector& psi = flux.psi[d];
    for (int i = 0; i < n; ++i) {
      const double wp = o.w * psi[i];
      m.phi[i] += wp;
      m.jx[i] += wp * o.x;
      m.jy[i] += wp * o.y;
      m.pxx[i] += wp * o.x * o.x;
      m.pxy[i] += wp * o.x * o.y;
      m.pyy[i] += wp * o.y * o.y;
      m.pzz[i] += wp * o.z * o.z;
    }
  }
  return m;
}

namespace {

// Iterative Tarjan strongly-connected components. Returns the component id
// of each node; ids are assigned in reverse topological order.
std::vector<int> tarjan_scc(const std::vector<std::vector<int>>& adj, int& n_comp) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  int next_index = 0;
  n_comp = 0;

  struct Frame {
    int v;
    std::size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> call;
    call.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& fr = call.back();
      const int v = fr.v;
      if (fr.child < adj[v].size()) {
        const int w = adj[v][fr.child++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          while (true) {
            const int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = n_comp;
            if (w == v) break;
          }
          ++n_comp;
        }
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }
  return comp;
}

}  // namespace

SweepOrder sweep_order(const Mesh& mesh, const Direction& dir, const QuadratureRule1D* rule) {
  QuadratureRule1D own;
  if (!rule) {
    own = make_quadrature_1d(2 * mesh.geom_degree() + 2);
    rule = &own;
  }
  const int ne = mesh.n_elements();
  const int nf = mesh.n_faces();
  SweepOrder result;
  result.reentrant.assign(nf, 0);

  // Directed dependency edges across interior faces (upwind -> downwind).
  std::vector<std::vector<int>> adj(ne);
  std::vector<std::pair<int, int>> edge_of_face(nf, {-1, -1});
  const double tol = 1e-13;
  for (int f = 0; f < nf; ++f) {
    const Face& face = mesh.face(f);
    if (face.boundary()) continue;
    double wmin = 0.0, wmax = 0.0, wavg = 0.0;
    for (int q = 0; q < rule->size(); ++q) {
      const FaceFrame fr = mesh.face_frame(f, rule->points[q]);
      const double w = dir.dot_n(fr.n);
      if (q == 0) {
        wmin = wmax = w;
      } else {
        wmin = std::min(wmin, w);
        wmax = std::max(wmax, w);
      }
      wavg += w;
    }
    wavg /= rule->size();
    if (wmin < -tol && wmax > tol) {
      result.reentrant[f] = 1;  // mixed sign along the face
    } else if (wavg > tol) {
      adj[face.elem1].push_back(face.elem2);  // flow from 1 into 2
      edge_of_face[f] = {face.elem1, face.elem2};
    } else if (wavg < -tol) {
      adj[face.elem2].push_back(face.elem1);
      edge_of_face[f] = {face.elem2, face.elem1};
    }
    // |Omega.n| ~ 0 uniformly: no dependency either way.
  }

  // Cycles (possible on distorted meshes): mark every face whose edge joins
  // two elements of one strongly-connected component as reentrant.
  int n_comp = 0;
  const std::vector<int> comp = tarjan_scc(adj, n_comp);
  for (int f = 0; f < nf; ++f) {
    const auto [a, b] = edge_of_face[f];
    if (a >= 0 && comp[a] == comp[b]) result.reentrant[f] = 1;
  }

  // Kahn's algorithm on the pruned graph, smallest element index first for a
  // deterministic order.
  std::vector<int> indeg(ne, 0);
  std::vector<std::vector<int>> pruned(ne);
  for (int f = 0; f < nf; ++f) {
    const auto [a, b] = edge_of_face[f];
    if (a >= 0 && !result.reentrant[f]) {
      pruned[a].push_back(b);
      ++indeg[b];
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int e = 0; e < ne; ++e)
    if (indeg[e] == 0) ready.push(e);
  result.order.reserve(ne);
  while (!ready.empty()) {
    const int e = ready.top();
    ready.pop();
    result.order.push_back(e);
    for (int to : pruned[e])
      if (--indeg[to] == 0) ready.push(to);
  }
  if (static_cast<int>(result.order.size()) != ne)
    throw std::logic_error("sweep_order: cycle left after pruning");
  return result;
}

void zero_and_scale_fixup(const std::vector<double>& nodal_weights, double* values, int n) {
  double total = 0.0;
  bool has_negative = false;
  for (int i = 0; i < n; ++i) {
    total += nodal_weights[i] * values[i];
    if (values[i] < 0.0) has_negative = true;
  }
  if (!has_negative) return;
  if (total <= 0.0) {
    std::fill(values, values + n, 0.0);
    return;
  }
  double positive = 0.0;
  for (int i = 0; i < n; ++i)
    if (values[i] > 0.0) positive += nodal_weights[i] * values[i];
  if (positive <= 0.0) {
    std::fill(values, values + n, 0.0);
    return;
  }
  const double factor = total / positive;
  for (int i = 0; i < n; ++i) values[i] = values[i] > 0.0 ? values[i] * factor : 0.0;
}

TransportSweeper::TransportSweeper(const TransportProblem& prob) : prob_(&prob) {
  prob.validate();
  const Mesh& mesh = *prob.mesh;
  const int p = prob.degree;
  const int m = mesh.geom_degree();
  space_ = std::make_unique<FiniteElementSpace>(mesh, SpaceKind::DG, p);
  vol_rule_ = make_quadrature_2d(2 * p + 2 * m);
  face_rule_ = make_quadrature_1d(2 * p + 2 * m);
  vol_tab_ = tabulate_scalar(*space_, vol_rule_.points, /*with_grad=*/true);
  face_tab_ = tabulate_scalar_faces(*space_, face_rule_, /*with_grad=*/false);
  vol_geom_ = cache_volume_geometry(mesh, vol_rule_);
  face_geom_ = cache_face_geometry(mesh, face_rule_);
  nb_ = space_->n_local_dofs();

  const int ne = mesh.n_elements();
  const int nq = vol_rule_.size();
  mass_.assign(ne, std::vector<double>(nb_ * nb_, 0.0));
  gx_.assign(ne, std::vector<double>(nb_ * nb_, 0.0));
  gy_.assign(ne, std::vector<double>(nb_ * nb_, 0.0));
  nodal_w_.assign(ne, std::vector<double>(nb_, 0.0));
  std::vector<Vec2> phys_grad(nb_);
  for (int e = 0; e < ne; ++e) {
    auto& m_e = mass_[e];
    auto& gx_e = gx_[e];
    auto& gy_e = gy_[e];
    for (int q = 0; q < nq; ++q) {
      const ElementFrame2& fr = vol_geom_.at(e, q);
      const double wj = vol_rule_.weights[q] * fr.J;
      for (int i = 0; i < nb_; ++i)
        phys_grad[i] = FiniteElementSpace::physical_grad(fr, vol_tab_.g(q, i));
      for (int i = 0; i < nb_; ++i) {
        const double vi = vol_tab_.v(q, i);
        for (int j = 0; j < nb_; ++j) {
          const double vj = vol_tab_.v(q, j);
          m_e[i * nb_ + j] += wj * vi * vj;
          gx_e[i * nb_ + j] += wj * phys_grad[i].x * vj;
          gy_e[i * nb_ + j] += wj * phys_grad[i].y * vj;
        }
      }
    }
    for (int i = 0; i < nb_; ++i)
      for (int j = 0; j < nb_; ++j) nodal_w_[e][i] += m_e[i * nb_ + j];
  }

  orders_.reserve(prob.quad.size());
  for (int d = 0; d < prob.quad.size(); ++d)
    orders_.push_back(sweep_order(mesh, prob.quad[d], &face_rule_));
}

Vector TransportSweeper::scattering_moments(const GridFunction& varphi) const {
  const FiniteElementSpace& vs = *varphi.space;
  if (&vs.mesh() != prob_->mesh)
    throw std::invalid_argument("scattering_moments: mesh mismatch");
  const ScalarTable vtab = tabulate_scalar(vs, vol_rule_.points, /*with_grad=*/false);
  const double four_pi = 4.0 * std::acos(-1.0);
  Vector out(space_->n_dofs(), 0.0);
  const int nq = vol_rule_.size();
  for (int e = 0; e < prob_->mesh->n_elements(); ++e) {
    const double s = prob_->sigma_s[e] / four_pi;
    if (s == 0.0) continue;
    const auto& vdofs = vs.element_dofs(e);
    const auto& vsigns = vs.element_signs(e);
    double* out_e = out.data() + static_cast<std::size_t>(e) * nb_;
    for (int q = 0; q < nq; ++q) {
      double val = 0.0;
      for (int j = 0; j < vtab.nb; ++j) val += vtab.v(q, j) * vsigns[j] * varphi.coeff[vdofs[j]];
      const double c = vol_rule_.weights[q] * vol_geom_.at(e, q).J * s * val;
      for (int i = 0; i < nb_; ++i) out_e[i] += c * vol_tab_.v(q, i);
    }
  }
  return out;
}

void TransportSweeper::local_system(int d, int e, const Vector& scattering,
                                    const AngularFlux& current, const AngularFlux* psi_prev,
                                    std::vector<double>& a, std::vector<double>& rhs) const {
  const Direction& dir = prob_->quad[d];
  const Mesh& mesh = *prob_->mesh;
  const double st = prob_->sigma_t[e];

  a.assign(nb_ * nb_, 0.0);
  const auto& m_e = mass_[e];
  const auto& gx_e = gx_[e];
  const auto& gy_e = gy_[e];
  for (int k = 0; k < nb_ * nb_; ++k) a[k] = st * m_e[k] - dir.x * gx_e[k] - dir.y * gy_e[k];

  rhs.assign(nb_, 0.0);
  if (!scattering.empty()) {
    const double* s_e = scattering.data() + static_cast<std::size_t>(e) * nb_;
    for (int i = 0; i < nb_; ++i) rhs[i] = s_e[i];
  }
  if (prob_->source) {
    for (int q = 0; q < vol_rule_.size(); ++q) {
      const ElementFrame2& fr = vol_geom_.at(e, q);
      const double c = vol_rule_.weights[q] * fr.J * prob_->source(fr.x, dir);
      for (int i = 0; i < nb_; ++i) rhs[i] += c * vol_tab_.v(q, i);
    }
  }

  for (int lf = 0; lf < 4; ++lf) {
    const int f = mesh.element_face(e, lf);
    const Face& face = mesh.face(f);
    const int side = face.elem1 == e ? 1 : 2;
    const double sgn = side == 1 ? 1.0 : -1.0;
    const bool my_flip = side == 2 && !face.aligned;
    const ScalarTable& my_tab = face_tab_.at(side == 1 ? face.local1 : face.local2, my_flip);
    const int neighbor = side == 1 ? face.elem2 : face.elem1;
    const bool nb_flip = side == 2 ? false : !face.aligned;
    const ScalarTable* nb_tab = nullptr;
    const double* nb_coeff = nullptr;
    for (int q = 0; q < face_rule_.size(); ++q) {
      const FaceFrame& fr = face_geom_.at(f, q);
      const double omega = sgn * dir.dot_n(fr.n);
      const double wq = face_rule_.weights[q] * fr.dl;
      if (omega > 0.0) {
        for (int i = 0; i < nb_; ++i) {
          const double c = wq * omega * my_tab.v(q, i);
          for (int j = 0; j < nb_; ++j) a[i * nb_ + j] += c * my_tab.v(q, j);
        }
      } else if (omega < 0.0) {
        double up = 0.0;
        if (face.boundary()) {
          if (prob_->inflow) up = prob_->inflow(fr.x, dir);
        } else {
          if (!nb_tab) {
            nb_tab = &face_tab_.at(side == 1 ? face.local2 : face.local1, nb_flip);
            const Vector* src = nullptr;
            if (orders_[d].reentrant[f]) {
              if (psi_prev) src = &psi_prev->psi[d];
            } else {
              src = &current.psi[d];
            }
            nb_coeff = src ? src->data() + static_cast<std::size_t>(neighbor) * nb_ : nullptr;
          }
          if (nb_coeff)
            for (int j = 0; j < nb_; ++j) up += nb_tab->v(q, j) * nb_coeff[j];
        }
        const double c = wq * (-omega) * up;
        for (int i = 0; i < nb_; ++i) rhs[i] += c * my_tab.v(q, i);
      }
    }
  }
}

AngularFlux TransportSweeper::sweep(const Vector& scattering, const AngularFlux* psi_prev,
                                    bool fixup) const {
  AngularFlux flux;
  flux.space = space_.get();
  flux.psi.assign(prob_->quad.size(), Vector(space_->n_dofs(), 0.0));

  std::vector<double> a, rhs;
  Eigen::MatrixXd amat(nb_, nb_);
  Eigen::VectorXd b(nb_), x(nb_);
  for (int d = 0; d < prob_->quad.size(); ++d) {
    for (int e : orders_[d].order) {
      local_system(d, e, scattering, flux, psi_prev, a, rhs);
      for (int i = 0; i < nb_; ++i) {
        b(i) = rhs[i];
        for (int j = 0; j < nb_; ++j) amat(i, j) = a[i * nb_ + j];
      }
      x = amat.partialPivLu().solve(b);
      double* out = flux.psi[d].data() + static_cast<std::size_t>(e) * nb_;
      for (int i = 0; i < nb_; ++i) out[i] = x(i);
      if (fixup) zero_and_scale_fixup(nodal_w_[e], out, nb_);
    }
  }
  return flux;
}

AngularFlux TransportSweeper::sweep(const GridFunction& varphi, const AngularFlux* psi_prev,
                                    bool fixup) const {
  return sweep(scattering_moments(varphi), psi_prev, fixup);
}

double TransportSweeper::balance_residual(const AngularFlux& flux,
                                          const GridFunction* varphi) const {
  const Mesh& mesh = *prob_->mesh;
  const Moments mom = angular_moments(flux, prob_->quad);

  // Collision and scattering-gain volume integrals.
  double collision = 0.0, scatter = 0.0, source = 0.0;
  const ScalarTable* vtab = nullptr;
  ScalarTable vtab_storage;
  if (varphi) {
    vtab_storage = tabulate_scalar(*varphi->space, vol_rule_.points, false);
    vtab = &vtab_storage;
  }
  const int nq = vol_rule_.size();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double* phi_e = mom.phi.data() + static_cast<std::size_t>(e) * nb_;
    for (int q = 0; q < nq; ++q) {
      const ElementFrame2& fr = vol_geom_.at(e, q);
      const double wj = vol_rule_.weights[q] * fr.J;
      double phi_val = 0.0;
      for (int i = 0; i < nb_; ++i) phi_val += vol_tab_.v(q, i) * phi_e[i];
      collision += wj * prob_->sigma_t[e] * phi_val;
      double varphi_val = phi_val;
      if (varphi) {
        varphi_val = 0.0;
        const auto& vdofs = varphi->space->element_dofs(e);
        const auto& vsigns = varphi->space->element_signs(e);
        for (int j = 0; j < vtab->nb; ++j)
          varphi_val += vtab->v(q, j) * vsigns[j] * varphi->coeff[vdofs[j]];
      }
      scatter += wj * prob_->sigma_s[e] * varphi_val;
      if (prob_->source) {
        double q0 = 0.0;
        for (int d = 0; d < prob_->quad.size(); ++d)
          q0 += prob_->quad[d].w * prob_->source(fr.x, prob_->quad[d]);
        source += wj * q0;
      }
    }
  }

  // Boundary leakage with the discrete upwind trace.
  double leak = 0.0;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.boundary()) continue;
    const ScalarTable& tab = face_tab_.at(face.local1, false);
    const int e = face.elem1;
    for (int q = 0; q < face_rule_.size(); ++q) {
      const FaceFrame& fr = face_geom_.at(f, q);
      const double wq = face_rule_.weights[q] * fr.dl;
      for (int d = 0; d < prob_->quad.size(); ++d) {
        const Direction& dir = prob_->quad[d];
        const double omega = dir.dot_n(fr.n);
        double up = 0.0;
        if (omega > 0.0) {
          const double* c = flux.psi[d].data() + static_cast<std::size_t>(e) * nb_;
          for (int i = 0; i < nb_; ++i) up += tab.v(q, i) * c[i];
        } else if (prob_->inflow) {
          up = prob_->inflow(fr.x, dir);
        }
        leak += wq * dir.w * omega * up;
      }
    }
  }

  const double residual = leak + collision - scatter - source;
  const double denom = std::max({std::abs(leak), std::abs(collision), std::abs(scatter),
                                 std::abs(source)});
  if (denom == 0.0) return 0.0;
  return std::abs(residual) / denom;
}

}  // namespace smm
