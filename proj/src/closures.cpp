#include "smm/closures.hpp"

#include <cmath>
#include <stdexcept>

namespace smm {

double discrete_eb0(const Vec2& n, const AngularQuadrature& quad) {
  double sum = 0.0;
  for (const Direction& d : quad.directions) sum += d.w * std::abs(d.dot_n(n));
  return sum / (4.0 * std::acos(-1.0));
}

double inflow_current(const std::function<double(const Vec2&, const Direction&)>& psi_bar,
                      const Vec2& x, const Vec2& n, const AngularQuadrature& quad) {
  if (!psi_bar) return 0.0;
  double sum = 0.0;
  for (const Direction& d : quad.directions) {
    const double on = d.dot_n(n);
    if (on < 0.0) sum += d.w * on * psi_bar(x, d);
  }
  return sum;
}

ClosureFields::ClosureFields(const AngularFlux& flux, const AngularQuadrature& quad)
    : flux_(&flux), quad_(&quad), space_(flux.space) {
  if (flux.n_directions() != quad.size())
    throw std::invalid_argument("closures: direction count mismatch");
  const int n = space_->n_dofs();
  txx_.assign(n, 0.0);
  txy_.assign(n, 0.0);
  tyy_.assign(n, 0.0);
  tzz_.assign(n, 0.0);
  const double third = 1.0 / 3.0;
  for (int d = 0; d < quad.size(); ++d) {
    const Direction& o = quad[d];
    const Vector& psi = flux.psi[d];
    const double cxx = o.w * (o.x * o.x - third);
    const double cxy = o.w * o.x * o.y;
    const double cyy = o.w * (o.y * o.y - third);
    const double czz = o.w * (o.z * o.z - third);
    for (int i = 0; i < n; ++i) {
      txx_[i] += cxx * psi[i];
      txy_[i] += cxy * psi[i];
      tyy_[i] += cyy * psi[i];
      tzz_[i] += czz * psi[i];
    }
  }
}

SymTensor ClosureFields::eval_T(int e, const Vec2& xi) const {
  std::vector<double> val(space_->n_local_dofs());
  space_->eval_scalar(xi, val);
  const auto& dofs = space_->element_dofs(e);
  SymTensor t{0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    t.xx += val[i] * txx_[dofs[i]];
    t.xy += val[i] * txy_[dofs[i]];
    t.yy += val[i] * tyy_[dofs[i]];
    t.zz += val[i] * tzz_[dofs[i]];
  }
  return t;
}

Vec2 ClosureFields::eval_div_T(int e, const ElementFrame& fr, const Vec2& xi) const {
  const int nb = space_->n_local_dofs();
  std::vector<double> val(nb);
  std::vector<Vec2> grad(nb);
  space_->eval_scalar(xi, val, grad);
  const auto& dofs = space_->element_dofs(e);
  Vec2 div{0.0, 0.0};
  for (int i = 0; i < nb; ++i) {
    const Vec2 g = FiniteElementSpace::physical_grad(fr, grad[i]);
    div.x += g.x * txx_[dofs[i]] + g.y * txy_[dofs[i]];
    div.y += g.x * txy_[dofs[i]] + g.y * tyy_[dofs[i]];
  }
  return div;
}

double ClosureFields::beta(int e, const Vec2& xi, const Vec2& n) const {
  const int nb = space_->n_local_dofs();
  std::vector<double> val(nb);
  space_->eval_scalar(xi, val);
  const auto& dofs = space_->element_dofs(e);
  const double eb0 = discrete_eb0(n, *quad_);
  double sum = 0.0;
  for (int d = 0; d < quad_->size(); ++d) {
    const Direction& o = (*quad_)[d];
    const Vector& psi = flux_->psi[d];
    double psi_val = 0.0;
    for (int i = 0; i < nb; ++i) psi_val += val[i] * psi[dofs[i]];
    sum += o.w * (std::abs(o.dot_n(n)) - eb0) * psi_val;
  }
  return sum;
}

MomentSources moment_sources(const TransportProblem& prob, const ClosureFields* closures) {
  MomentSources src;
  src.closures = closures;
  if (prob.source) {
    const auto q = prob.source;
    const AngularQuadrature quad = prob.quad;
    src.q0 = [q, quad](const Vec2& x) {
      double sum = 0.0;
      for (const Direction& d : quad.directions) sum += d.w * q(x, d);
      return sum;
    };
    src.q1 = [q, quad](const Vec2& x) {
      Vec2 sum{0.0, 0.0};
      for (const Direction& d : quad.directions) {
        const double wq = d.w * q(x, d);
        sum.x += wq * d.x;
        sum.y += wq * d.y;
      }
      return sum;
    };
  }
  if (prob.inflow) {
    const auto bar = prob.inflow;
    const AngularQuadrature quad = prob.quad;
    src.jin = [bar, quad](const Vec2& x, const Vec2& n) {
      return inflow_current(bar, x, n, quad);
    };
  }
  return src;
}

}  // namespace smm
