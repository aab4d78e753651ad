// Additive closure fields: the discrete boundary constant, inflow currents,
// exact vanishing for isotropic and linear-in-angle fluxes, the trace
// identity, and agreement with analytic moments of a quadratically
// anisotropic field under a fourth-moment-exact quadrature.
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "smm/angular.hpp"
#include "smm/closures.hpp"
#include "smm/fespace.hpp"
#include "smm/mesh.hpp"
#include "smm/mms.hpp"
#include "smm/transport.hpp"

using namespace smm;

namespace {

Mesh curved_mesh() {
  Mesh m = Mesh::cartesian(3, 3, {0, 0}, {1, 1}, 2);
  m.distort_taylor_green(0.2, 50);
  return m;
}

// Reference-square Gauss nodes of the DG basis, matched to local dof ids by
// evaluating the (nodal) basis: the dof whose basis value is 1 owns the node.
std::vector<std::pair<Vec2, int>> dg_nodes(const FiniteElementSpace& dg) {
  const int p = dg.degree();
  const std::vector<double> g = gauss_legendre_nodes(p + 1);
  std::vector<std::pair<Vec2, int>> nodes;
  std::vector<double> val;
  for (double gy : g)
    for (double gx : g) {
      const Vec2 xi{gx, gy};
      dg.eval_scalar(xi, val);
      int owner = -1;
      for (int i = 0; i < dg.n_local_dofs(); ++i)
        if (std::abs(val[i] - 1.0) < 1e-9) owner = i;
      REQUIRE(owner >= 0);
      nodes.push_back({xi, owner});
    }
  return nodes;
}

AngularFlux random_flux(const FiniteElementSpace& space, const AngularQuadrature& quad,
                        unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(0.2, 1.7);
  AngularFlux flux;
  flux.space = &space;
  flux.psi.assign(quad.size(), Vector(space.n_dofs(), 0.0));
  for (Vector& psi : flux.psi)
    for (double& v : psi) v = dist(gen);
  return flux;
}

}  // namespace

TEST_CASE("discrete boundary constant: frozen values and quadrature limit") {
  const AngularQuadrature s4 = build_angular_quadrature(2, 4);

  // Closed form for the 2x4 rule and an axis-aligned normal:
  // (sqrt(2)/2) * (sin(theta_1) + sin(theta_2)) / 2 with polar cosines
  // mu = 1/2 +- sqrt(3)/6.
  CHECK(discrete_eb0({1, 0}, s4) == doctest::Approx(0.5629369145925675).epsilon(1e-13));
  CHECK(discrete_eb0({0, 1}, s4) == doctest::Approx(0.5629369145925675).epsilon(1e-13));
  CHECK(discrete_eb0({-1, 0}, s4) == doctest::Approx(0.5629369145925675).epsilon(1e-13));

  const double r = std::sqrt(0.5);
  CHECK(discrete_eb0({r, r}, s4) == doctest::Approx(0.39805650968863676).epsilon(1e-13));

  // The continuum constant is 1/2; a refined rule gets close.
  const AngularQuadrature fine = build_angular_quadrature(16, 32);
  CHECK(std::abs(discrete_eb0({1, 0}, fine) - 0.5) < 5e-3);
  CHECK(std::abs(discrete_eb0({r, r}, fine) - 0.5) < 5e-3);
}

TEST_CASE("inflow current of isotropic data") {
  const AngularQuadrature quad = build_angular_quadrature(2, 4);
  const double c = 1.7;
  const auto iso = [&](const Vec2&, const Direction&) { return c; };

  for (const Vec2 n : {Vec2{1, 0}, Vec2{0, -1}, Vec2{std::sqrt(0.5), std::sqrt(0.5)}}) {
    const double jin = inflow_current(iso, {0.3, 0.4}, n, quad);
    const double expect = -2.0 * M_PI * discrete_eb0(n, quad) * c;
    CHECK(jin == doctest::Approx(expect).epsilon(1e-13));
    CHECK(jin < 0.0);
  }

  CHECK(inflow_current(nullptr, {0.3, 0.4}, {1, 0}, quad) == 0.0);
}

TEST_CASE("closures vanish for isotropic and linear-in-angle fluxes") {
  const Mesh m = curved_mesh();
  const FiniteElementSpace dg(m, SpaceKind::DG, 2);
  const AngularQuadrature quad = build_angular_quadrature(2, 4);

  std::mt19937 gen(17u);
  std::uniform_real_distribution<double> dist(0.5, 2.0);
  Vector a(dg.n_dofs()), bx(dg.n_dofs()), by(dg.n_dofs());
  for (int i = 0; i < dg.n_dofs(); ++i) {
    a[i] = dist(gen);
    bx[i] = dist(gen) - 1.0;
    by[i] = dist(gen) - 1.0;
  }

  const auto check_vanishing = [&](const AngularFlux& flux) {
    const ClosureFields cf(flux, quad);
    double tmax = 0.0;
    for (int i = 0; i < dg.n_dofs(); ++i) {
      tmax = std::max(tmax, std::abs(cf.txx()[i]));
      tmax = std::max(tmax, std::abs(cf.txy()[i]));
      tmax = std::max(tmax, std::abs(cf.tyy()[i]));
      tmax = std::max(tmax, std::abs(cf.tzz()[i]));
    }
    CHECK(tmax < 1e-12);

    double bmax = 0.0;
    for (int f = 0; f < m.n_faces(); ++f) {
      const Face& face = m.face(f);
      if (!face.boundary()) continue;
      for (double s : {0.2, 0.7}) {
        const FaceFrame fr = m.face_frame(f, s);
        bmax = std::max(bmax, std::abs(cf.beta(face.elem1, fr.xi1, fr.n)));
      }
    }
    CHECK(bmax < 1e-12);
  };

  SUBCASE("isotropic") {
    AngularFlux flux;
    flux.space = &dg;
    flux.psi.assign(quad.size(), a);
    check_vanishing(flux);
  }

  SUBCASE("linear in angle") {
    AngularFlux flux;
    flux.space = &dg;
    flux.psi.assign(quad.size(), Vector(dg.n_dofs(), 0.0));
    for (int d = 0; d < quad.size(); ++d)
      for (int i = 0; i < dg.n_dofs(); ++i)
        flux.psi[d][i] = a[i] + quad[d].x * bx[i] + quad[d].y * by[i];
    check_vanishing(flux);
  }
}

TEST_CASE("correction tensor is trace-free for arbitrary fluxes") {
  const Mesh m = curved_mesh();
  const FiniteElementSpace dg(m, SpaceKind::DG, 1);
  const AngularQuadrature quad = build_angular_quadrature(3, 8);
  const AngularFlux flux = random_flux(dg, quad, 23u);

  const ClosureFields cf(flux, quad);
  for (int i = 0; i < dg.n_dofs(); ++i)
    CHECK(std::abs(cf.txx()[i] + cf.tyy()[i] + cf.tzz()[i]) < 1e-13);
}

TEST_CASE("nodal closure tensor matches the analytic moments of a quadratic field") {
  // With a quadrature exact through fourth angular moments, the discrete
  // closure of psi = (1/4pi)[alpha + Omega.beta + OmegaOmega:Theta] equals
  //   T_xx = (4 Theta11 - 2 Theta22)/45, T_xy = 2 Theta12 / 15,
  //   T_yy = (4 Theta22 - 2 Theta11)/45, T_zz = -2 (Theta11+Theta22)/45
  // pointwise at the interpolation nodes.
  const Mesh m = curved_mesh();
  const FiniteElementSpace dg(m, SpaceKind::DG, 2);
  const AngularQuadrature quad = build_angular_quadrature(3, 8);
  const ManufacturedField mms;

  AngularFlux flux;
  flux.space = &dg;
  flux.psi.assign(quad.size(), Vector(dg.n_dofs(), 0.0));
  const auto nodes = dg_nodes(dg);
  for (int e = 0; e < m.n_elements(); ++e) {
    const std::vector<int>& dofs = dg.element_dofs(e);
    for (const auto& [xi, loc] : nodes) {
      const Vec2 x = m.element_frame(e, xi).x;
      for (int d = 0; d < quad.size(); ++d) flux.psi[d][dofs[loc]] = mms.psi(x, quad[d]);
    }
  }

  const ClosureFields cf(flux, quad);
  for (int e = 0; e < m.n_elements(); ++e) {
    const std::vector<int>& dofs = dg.element_dofs(e);
    for (const auto& [xi, loc] : nodes) {
      const Vec2 x = m.element_frame(e, xi).x;
      const double t11 = mms.theta11(x), t12 = mms.theta12(x), t22 = mms.theta22(x);
      const int i = dofs[loc];
      CHECK(cf.txx()[i] == doctest::Approx((4.0 * t11 - 2.0 * t22) / 45.0).epsilon(5e-12).scale(1.0));
      CHECK(cf.txy()[i] == doctest::Approx(2.0 * t12 / 15.0).epsilon(5e-12).scale(1.0));
      CHECK(cf.tyy()[i] == doctest::Approx((4.0 * t22 - 2.0 * t11) / 45.0).epsilon(5e-12).scale(1.0));
      CHECK(cf.tzz()[i] == doctest::Approx(-2.0 * (t11 + t22) / 45.0).epsilon(5e-12).scale(1.0));

      const SymTensor t = cf.eval_T(e, xi);
      CHECK(t.xx == doctest::Approx(cf.txx()[i]).epsilon(1e-11).scale(1.0));
      CHECK(t.trace3() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("broken divergence of the closure tensor matches finite differences") {
  const Mesh m = curved_mesh();
  const FiniteElementSpace dg(m, SpaceKind::DG, 2);
  const AngularQuadrature quad = build_angular_quadrature(2, 8);
  const AngularFlux flux = random_flux(dg, quad, 31u);
  const ClosureFields cf(flux, quad);

  const double h = 1e-5;
  const auto grad_of = [&](int e, const Vec2& xi, const ElementFrame& fr,
                           double (*pick)(const SymTensor&)) {
    const Vec2 dxi{(pick(cf.eval_T(e, {xi.x + h, xi.y})) - pick(cf.eval_T(e, {xi.x - h, xi.y}))) /
                       (2.0 * h),
                   (pick(cf.eval_T(e, {xi.x, xi.y + h})) - pick(cf.eval_T(e, {xi.x, xi.y - h}))) /
                       (2.0 * h)};
    return FiniteElementSpace::physical_grad(fr, dxi);
  };

  for (int e : {0, 4, 8}) {
    for (const Vec2 xi : {Vec2{0.31, 0.62}, Vec2{0.5, 0.5}}) {
      const ElementFrame fr = m.element_frame(e, xi);
      const Vec2 gxx = grad_of(e, xi, fr, [](const SymTensor& t) { return t.xx; });
      const Vec2 gxy = grad_of(e, xi, fr, [](const SymTensor& t) { return t.xy; });
      const Vec2 gyy = grad_of(e, xi, fr, [](const SymTensor& t) { return t.yy; });

      const Vec2 div = cf.eval_div_T(e, fr, xi);
      CHECK(div.x == doctest::Approx(gxx.x + gxy.y).epsilon(1e-7).scale(1.0));
      CHECK(div.y == doctest::Approx(gxy.x + gyy.y).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("boundary factor equals its defining angular sums") {
  const Mesh m = curved_mesh();
  const FiniteElementSpace dg(m, SpaceKind::DG, 1);
  const AngularQuadrature quad = build_angular_quadrature(2, 4);
  const AngularFlux flux = random_flux(dg, quad, 41u);
  const ClosureFields cf(flux, quad);

  for (int f = 0; f < m.n_faces(); ++f) {
    const Face& face = m.face(f);
    if (!face.boundary()) continue;
    const FaceFrame fr = m.face_frame(f, 0.37);
    const int e = face.elem1;

    double absflux = 0.0, phi = 0.0;
    for (int d = 0; d < quad.size(); ++d) {
      GridFunction psi(dg);
      psi.coeff = flux.psi[d];
      const double v = eval_scalar(psi, e, fr.xi1);
      absflux += quad[d].w * std::abs(quad[d].dot_n(fr.n)) * v;
      phi += quad[d].w * v;
    }
    const double expect = absflux - discrete_eb0(fr.n, quad) * phi;
    CHECK(cf.beta(e, fr.xi1, fr.n) == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("moment sources integrate the fixed source and inflow consistently") {
  const Mesh m = Mesh::cartesian(2, 2, {0, 0}, {1, 1});
  const ManufacturedField mms;
  TransportProblem prob;
  prob.mesh = &m;
  prob.degree = 1;
  prob.quad = build_angular_quadrature(2, 4);
  prob.sigma_t.assign(m.n_elements(), mms.sigma_t);
  prob.sigma_s.assign(m.n_elements(), mms.sigma_s);
  prob.source = [&](const Vec2& x, const Direction& om) { return mms.source(x, om); };
  prob.inflow = [&](const Vec2& x, const Direction& om) { return mms.psi(x, om); };

  const MomentSources src = moment_sources(prob, nullptr);
  CHECK(src.closures == nullptr);

  const Vec2 x{0.3, 0.8};
  double q0 = 0.0;
  Vec2 q1{0, 0};
  for (int d = 0; d < prob.quad.size(); ++d) {
    const double q = mms.source(x, prob.quad[d]);
    q0 += prob.quad[d].w * q;
    q1 += prob.quad[d].w * q * prob.quad[d].xy();
  }
  CHECK(src.q0(x) == doctest::Approx(q0).epsilon(1e-13).scale(1.0));
  CHECK(src.q1(x).x == doctest::Approx(q1.x).epsilon(1e-13).scale(1.0));
  CHECK(src.q1(x).y == doctest::Approx(q1.y).epsilon(1e-13).scale(1.0));

  const Vec2 n{0, -1};
  CHECK(src.jin(x, n) ==
        doctest::Approx(inflow_current(prob.inflow, x, n, prob.quad)).epsilon(1e-13).scale(1.0));
}
