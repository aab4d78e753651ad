// Upwind DG transport sweeps: exact preservation of constant solutions,
// per-direction manufactured convergence, sweep ordering, negativity fixup,
// angular moments, and the global balance residual.
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "smm/angular.hpp"
#include "smm/fespace.hpp"
#include "smm/mesh.hpp"
#include "smm/quadrature.hpp"
#include "smm/transport.hpp"

using namespace smm;

namespace {

constexpr double kFourPi = 4.0 * M_PI;

TransportProblem make_problem(const Mesh& m, int degree, int n_polar, int n_azim) {
  TransportProblem prob;
  prob.mesh = &m;
  prob.degree = degree;
  prob.quad = build_angular_quadrature(n_polar, n_azim);
  prob.sigma_t.assign(m.n_elements(), 1.0);
  prob.sigma_s.assign(m.n_elements(), 0.0);
  return prob;
}

AngularFlux constant_flux(const FiniteElementSpace& space, int n_dirs, double value) {
  AngularFlux f;
  f.space = &space;
  f.psi.assign(n_dirs, Vector(space.n_dofs(), value));
  return f;
}

double min_coeff(const AngularFlux& f) {
  double m = std::numeric_limits<double>::infinity();
  for (const Vector& psi : f.psi)
    for (double v : psi) m = std::min(m, v);
  return m;
}

}  // namespace

TEST_CASE("sweeps preserve the constant isotropic solution exactly") {
  // With sigma_t = 1, sigma_s = 0.5 the constant psi = c/4pi solves the
  // equation when q = sigma_a c / 4pi and the inflow equals c/4pi.
  const double c = 2.0;

  const auto run = [&](const Mesh& m, bool pass_prev) {
    TransportProblem prob = make_problem(m, 2, 2, 4);
    prob.sigma_s.assign(m.n_elements(), 0.5);
    prob.source = [&](const Vec2&, const Direction&) { return 0.5 * c / kFourPi; };
    prob.inflow = [&](const Vec2&, const Direction&) { return c / kFourPi; };
    prob.validate();

    const TransportSweeper sweeper(prob);
    const FiniteElementSpace cg(m, SpaceKind::CG, 1);
    GridFunction varphi(cg);
    std::fill(varphi.coeff.begin(), varphi.coeff.end(), c);

    const AngularFlux prev = constant_flux(sweeper.space(), prob.quad.size(), c / kFourPi);
    const AngularFlux flux =
        sweeper.sweep(varphi, pass_prev ? &prev : nullptr, /*fixup=*/false);

    for (const Vector& psi : flux.psi)
      for (double v : psi) CHECK(v == doctest::Approx(c / kFourPi).epsilon(1e-12));

    CHECK(std::abs(sweeper.balance_residual(flux, &varphi)) < 1e-11);
  };

  SUBCASE("cartesian mesh") {
    const Mesh m = Mesh::cartesian(4, 4, {0, 0}, {1, 1});
    run(m, false);
  }
  SUBCASE("curved mesh with lagged reentrant data") {
    Mesh m = Mesh::cartesian(4, 4, {0, 0}, {1, 1}, 3);
    m.distort_taylor_green(0.3 * M_PI, 300);
    run(m, true);
  }
}

TEST_CASE("per-direction sweeps converge at order p+1") {
  const auto g = [](const Vec2& x) { return 1.0 + std::sin(M_PI * x.x) * std::sin(M_PI * x.y); };
  const auto grad_g = [](const Vec2& x) -> Vec2 {
    return {M_PI * std::cos(M_PI * x.x) * std::sin(M_PI * x.y),
            M_PI * std::sin(M_PI * x.x) * std::cos(M_PI * x.y)};
  };

  for (int p : {1, 2}) {
    std::vector<double> errs;
    for (int n : {4, 8, 16}) {
      const Mesh m = Mesh::cartesian(n, n, {0, 0}, {1, 1});
      TransportProblem prob = make_problem(m, p, 2, 4);
      prob.source = [&](const Vec2& x, const Direction& d) {
        return d.xy().dot(grad_g(x)) + g(x);
      };
      prob.inflow = [&](const Vec2& x, const Direction&) { return g(x); };

      const TransportSweeper sweeper(prob);
      const AngularFlux flux = sweeper.sweep(Vector{}, nullptr, false);

      // Every direction solves the same manufactured problem; measure two.
      double err = 0.0;
      for (int d : {0, 5}) {
        GridFunction psi(sweeper.space());
        psi.coeff = flux.psi[d];
        err = std::max(err, l2_error(psi, g));
      }
      errs.push_back(err);
    }
    const double order = std::log2(errs[errs.size() - 2] / errs.back());
    CHECK(order == doctest::Approx(p + 1.0).epsilon(0.35 / (p + 1.0)));
  }
}

TEST_CASE("nodal fixup zeroes negatives and preserves the weighted integral") {
  SUBCASE("uniform weights") {
    std::vector<double> w = {1.0, 1.0, 1.0};
    double v[] = {-1.0, 2.0, 3.0};
    zero_and_scale_fixup(w, v, 3);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == doctest::Approx(1.6).epsilon(1e-14));
    CHECK(v[2] == doctest::Approx(2.4).epsilon(1e-14));
  }
  SUBCASE("nonuniform weights") {
    std::vector<double> w = {2.0, 1.0};
    double v[] = {-1.0, 4.0};
    zero_and_scale_fixup(w, v, 2);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == doctest::Approx(2.0).epsilon(1e-14));  // integral 2 preserved
  }
  SUBCASE("non-positive integral zeroes the element") {
    std::vector<double> w = {1.0, 1.0, 1.0};
    double v[] = {-4.0, 1.0, 1.0};
    zero_and_scale_fixup(w, v, 3);
    for (double x : v) CHECK(x == 0.0);
  }
  SUBCASE("positive data is untouched") {
    std::vector<double> w = {1.0, 2.0};
    double v[] = {0.5, 1.5};
    zero_and_scale_fixup(w, v, 2);
    CHECK(v[0] == 0.5);
    CHECK(v[1] == 1.5);
  }
}

TEST_CASE("fixup removes sweep negativities") {
  // A sharp source edge inside elements plus strong absorption produces
  // undershoots in the plain DG sweep.
  const Mesh m = Mesh::cartesian(8, 8, {0, 0}, {1, 1});
  TransportProblem prob = make_problem(m, 2, 2, 4);
  prob.sigma_t.assign(m.n_elements(), 5.0);
  prob.source = [](const Vec2& x, const Direction&) {
    return (x.x < 0.23 && x.y < 0.23) ? 1.0 : 0.0;
  };

  const TransportSweeper sweeper(prob);
  const AngularFlux raw = sweeper.sweep(Vector{}, nullptr, false);
  const AngularFlux fixed = sweeper.sweep(Vector{}, nullptr, true);

  CHECK(min_coeff(raw) < -1e-8);
  CHECK(min_coeff(fixed) >= -1e-14);

  // The fixup perturbs the balance; it should stay a modest relative error
  // while the plain sweep balances to roundoff.
  CHECK(std::abs(sweeper.balance_residual(raw)) < 1e-11);
  CHECK(std::abs(sweeper.balance_residual(fixed)) < 0.5);

  // Total particle content stays comparable.
  const Moments mr = angular_moments(raw, prob.quad);
  const Moments mf = angular_moments(fixed, prob.quad);
  double sr = 0.0, sf = 0.0;
  for (std::size_t i = 0; i < mr.phi.size(); ++i) {
    sr += mr.phi[i];
    sf += mf.phi[i];
  }
  CHECK(sf == doctest::Approx(sr).epsilon(0.2));
}

TEST_CASE("sweep order respects upwind dependencies on a curved mesh") {
  Mesh m = Mesh::cartesian(5, 5, {0, 0}, {1, 1}, 2);
  m.distort_taylor_green(0.25, 60);

  const AngularQuadrature quad = build_angular_quadrature(2, 8);
  const QuadratureRule1D rule = make_quadrature_1d(2 * m.geom_degree() + 2);

  for (int d = 0; d < quad.size(); ++d) {
    const SweepOrder so = sweep_order(m, quad[d]);
    REQUIRE(static_cast<int>(so.order.size()) == m.n_elements());
    REQUIRE(static_cast<int>(so.reentrant.size()) == m.n_faces());

    // The order is a permutation of the elements.
    std::vector<int> pos(m.n_elements(), -1);
    for (int k = 0; k < m.n_elements(); ++k) {
      REQUIRE(so.order[k] >= 0);
      REQUIRE(so.order[k] < m.n_elements());
      REQUIRE(pos[so.order[k]] == -1);
      pos[so.order[k]] = k;
    }

    for (int f = 0; f < m.n_faces(); ++f) {
      const Face& face = m.face(f);
      if (face.boundary()) continue;

      double avg = 0.0;
      bool pos_sign = false, neg_sign = false;
      for (int q = 0; q < rule.size(); ++q) {
        const FaceFrame fr = m.face_frame(f, rule.points[q]);
        const double s = quad[d].dot_n(fr.n);
        avg += rule.weights[q] * fr.dl * s;
        if (s > 1e-12) pos_sign = true;
        if (s < -1e-12) neg_sign = true;
      }

      // A face whose normal flux changes sign must be lagged.
      if (pos_sign && neg_sign) CHECK(so.reentrant[f] == 1);

      // Non-lagged faces must be swept upwind-first.
      if (!so.reentrant[f]) {
        const int up = avg > 0.0 ? face.elem1 : face.elem2;
        const int down = avg > 0.0 ? face.elem2 : face.elem1;
        CHECK(pos[up] < pos[down]);
      }
    }
  }
}

TEST_CASE("angular moments match direction-by-direction sums") {
  const Mesh m = Mesh::cartesian(2, 2, {0, 0}, {1, 1});
  const FiniteElementSpace dg(m, SpaceKind::DG, 1);
  const AngularQuadrature quad = build_angular_quadrature(2, 8);

  std::mt19937 gen(2024u);
  std::uniform_real_distribution<double> dist(0.1, 2.0);
  AngularFlux flux;
  flux.space = &dg;
  flux.psi.assign(quad.size(), Vector(dg.n_dofs(), 0.0));
  for (Vector& psi : flux.psi)
    for (double& v : psi) v = dist(gen);

  const Moments mom = angular_moments(flux, quad);
  REQUIRE(static_cast<int>(mom.phi.size()) == dg.n_dofs());

  for (int i = 0; i < dg.n_dofs(); ++i) {
    double phi = 0.0, jx = 0.0, jy = 0.0, pxx = 0.0, pxy = 0.0, pyy = 0.0, pzz = 0.0;
    for (int d = 0; d < quad.size(); ++d) {
      const Direction& o = quad[d];
      const double wpsi = o.w * flux.psi[d][i];
      phi += wpsi;
      jx += wpsi * o.x;
      jy += wpsi * o.y;
      pxx += wpsi * o.x * o.x;
      pxy += wpsi * o.x * o.y;
      pyy += wpsi * o.y * o.y;
      pzz += wpsi * o.z * o.z;
    }
    CHECK(mom.phi[i] == doctest::Approx(phi).epsilon(1e-13));
    CHECK(mom.jx[i] == doctest::Approx(jx).epsilon(1e-13));
    CHECK(mom.jy[i] == doctest::Approx(jy).epsilon(1e-13));
    CHECK(mom.pxx[i] == doctest::Approx(pxx).epsilon(1e-13));
    CHECK(mom.pxy[i] == doctest::Approx(pxy).epsilon(1e-13));
    CHECK(mom.pyy[i] == doctest::Approx(pyy).epsilon(1e-13));
    CHECK(mom.pzz[i] == doctest::Approx(pzz).epsilon(1e-13));
    // Trace identity of the full second-moment tensor.
    CHECK(mom.pxx[i] + mom.pyy[i] + mom.pzz[i] == doctest::Approx(phi).epsilon(1e-12));
  }
}

TEST_CASE("transport problem validation") {
  const Mesh m = Mesh::cartesian(2, 2, {0, 0}, {1, 1});
  TransportProblem prob = make_problem(m, 1, 2, 4);
  CHECK_NOTHROW(prob.validate());

  prob.sigma_s.assign(m.n_elements(), 2.0);  // exceeds sigma_t
  CHECK_THROWS_AS(prob.validate(), std::invalid_argument);

  prob.sigma_s.assign(2, 0.5);  // wrong size
  CHECK_THROWS_AS(prob.validate(), std::invalid_argument);
}
