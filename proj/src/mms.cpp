#include "smm/mms.hpp"

#include <cmath>

namespace smm {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFourPi = 4.0 * kPi;

struct SinProduct {
  double k, shift;
  double value(const Vec2& x) const {
    return std::sin(k * (x.x + shift)) * std::sin(k * (x.y + shift));
  }
  Vec2 grad(const Vec2& x) const {
    return {k * std::cos(k * (x.x + shift)) * std::sin(k * (x.y + shift)),
            k * std::sin(k * (x.x + shift)) * std::cos(k * (x.y + shift))};
  }
};

}  // namespace

double ManufacturedField::alpha(const Vec2& x) const {
  return SinProduct{kPi, 0.0}.value(x) + offset;
}

double ManufacturedField::beta_component(const Vec2& x) const {
  return SinProduct{2.0 * kPi / (1.0 + 2.0 * omega), omega}.value(x);
}

double ManufacturedField::theta11(const Vec2& x) const {
  return 0.5 * SinProduct{3.0 * kPi / (1.0 + 2.0 * zeta), zeta}.value(x);
}

double ManufacturedField::theta12(const Vec2& x) const { return beta_component(x); }

double ManufacturedField::theta22(const Vec2& x) const { return 0.5 * theta11(x); }

double ManufacturedField::psi(const Vec2& x, const Direction& om) const {
  const double b = beta_component(x);
  return (alpha(x) + (om.x + om.y) * b +
          om.x * om.x * theta11(x) + 2.0 * om.x * om.y * b + om.y * om.y * theta22(x)) /
         kFourPi;
}

double ManufacturedField::phi(const Vec2& x) const {
  return alpha(x) + (theta11(x) + theta22(x)) / 3.0;
}

Vec2 ManufacturedField::current(const Vec2& x) const {
  const double b = beta_component(x) / 3.0;
  return {b, b};
}

SymTensor ManufacturedField::pressure(const Vec2& x) const {
  const double a3 = alpha(x) / 3.0;
  const double t11 = theta11(x), t22 = theta22(x), t12 = theta12(x);
  SymTensor p;
  p.xx = a3 + (3.0 * t11 + t22) / 15.0;
  p.yy = a3 + (t11 + 3.0 * t22) / 15.0;
  p.xy = t12 / 15.0;
  p.zz = a3 + (t11 + t22) / 15.0;
  return p;
}

double ManufacturedField::source(const Vec2& x, const Direction& om) const {
  const SinProduct sa{kPi, 0.0};
  const SinProduct sb{2.0 * kPi / (1.0 + 2.0 * omega), omega};
  const SinProduct sc{3.0 * kPi / (1.0 + 2.0 * zeta), zeta};
  const Vec2 da = sa.grad(x);
  const Vec2 db = sb.grad(x);
  const Vec2 dc = sc.grad(x);
  // grad psi: alpha and the angular polynomial share the closed forms above;
  // Theta11 = c/2, Theta22 = c/4, Theta12 = b with c the cubic sinusoid.
  const double ang_b = (om.x + om.y) + 2.0 * om.x * om.y;  // multiplies b
  const double ang_c = 0.5 * om.x * om.x + 0.25 * om.y * om.y;
  const Vec2 grad_psi{(da.x + ang_b * db.x + ang_c * dc.x) / kFourPi,
                      (da.y + ang_b * db.y + ang_c * dc.y) / kFourPi};
  return om.x * grad_psi.x + om.y * grad_psi.y + sigma_t * psi(x, om) -
         sigma_s / kFourPi * phi(x);
}

}  // namespace smm
