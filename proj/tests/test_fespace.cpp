// Finite element spaces: dof counts, projection exactness, inter-element
// continuity properties, and the Piola transforms on curved elements.
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "smm/fespace.hpp"
#include "smm/lagrange.hpp"
#include "smm/mesh.hpp"

using namespace smm;

namespace {

GridFunction random_field(const FiniteElementSpace& s, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  GridFunction u(s);
  for (double& c : u.coeff) c = dist(gen);
  return u;
}

}  // namespace

TEST_CASE("dof counts on a 3x3 cartesian mesh") {
  const Mesh m = Mesh::cartesian(3, 3, {0, 0}, {1, 1});
  REQUIRE(m.n_elements() == 9);
  REQUIRE(m.n_faces() == 24);  // 12 boundary + 12 interior

  for (int p = 1; p <= 3; ++p) {
    const FiniteElementSpace dg(m, SpaceKind::DG, p);
    CHECK(dg.n_dofs() == 9 * (p + 1) * (p + 1));
    CHECK(dg.n_local_dofs() == (p + 1) * (p + 1));
    CHECK_FALSE(dg.vector_valued());

    const FiniteElementSpace cg(m, SpaceKind::CG, p);
    CHECK(cg.n_dofs() == (3 * p + 1) * (3 * p + 1));
    CHECK(cg.n_local_dofs() == (p + 1) * (p + 1));
    CHECK_FALSE(cg.vector_valued());

    // Q_{p+1,p} x Q_{p,p+1}: p+1 shared normal dofs per face plus
    // 2p(p+1) interior dofs per element.
    const FiniteElementSpace rt(m, SpaceKind::RT, p);
    CHECK(rt.n_dofs() == 24 * (p + 1) + 9 * 2 * p * (p + 1));
    CHECK(rt.n_local_dofs() == 2 * (p + 1) * (p + 2));
    CHECK(rt.vector_valued());

    const FiniteElementSpace brt(m, SpaceKind::BrokenRT, p);
    CHECK(brt.n_dofs() == 9 * 2 * (p + 1) * (p + 2));
    CHECK(brt.n_local_dofs() == 2 * (p + 1) * (p + 2));
    CHECK(brt.vector_valued());

    const FiniteElementSpace tr(m, SpaceKind::Trace, p);
    CHECK(tr.n_dofs() == 12 * (p + 1));
    CHECK_FALSE(tr.vector_valued());
  }

  // The convention pinned above for p = 1, 2 explicitly.
  CHECK(FiniteElementSpace(m, SpaceKind::RT, 1).n_dofs() == 84);
  CHECK(FiniteElementSpace(m, SpaceKind::RT, 2).n_dofs() == 180);
  CHECK(FiniteElementSpace(m, SpaceKind::BrokenRT, 1).n_dofs() == 108);
  CHECK(FiniteElementSpace(m, SpaceKind::BrokenRT, 2).n_dofs() == 216);
  CHECK(FiniteElementSpace(m, SpaceKind::Trace, 1).n_dofs() == 24);
  CHECK(FiniteElementSpace(m, SpaceKind::Trace, 2).n_dofs() == 36);
}

TEST_CASE("L2 projection reproduces in-space polynomials exactly") {
  const Mesh m = Mesh::cartesian(3, 2, {0, 0}, {1.5, 1}, 1);
  const auto f = [](Vec2 x) {
    return (1.0 + 2.0 * x.x + x.x * x.x) * (1.0 - x.y + 0.5 * x.y * x.y);
  };

  for (SpaceKind kind : {SpaceKind::DG, SpaceKind::CG}) {
    const FiniteElementSpace s(m, kind, 2);
    const GridFunction u = l2_project(s, f);
    CHECK(l2_error(u, f) < 1e-12);
  }

  // Degree-1 Raviart-Thomas holds Q_{2,1} x Q_{1,2} on each (affine) element.
  const auto v = [](Vec2 x) -> Vec2 {
    return {(1.0 + x.x + 0.5 * x.x * x.x) * (2.0 - x.y),
            (1.0 - 0.5 * x.x) * (1.0 + x.y + x.y * x.y)};
  };
  for (SpaceKind kind : {SpaceKind::RT, SpaceKind::BrokenRT}) {
    const FiniteElementSpace s(m, kind, 1);
    const GridFunction u = l2_project_vector(s, v);
    CHECK(l2_error_vector(u, v) < 1e-11);
  }
}

TEST_CASE("RT fields have continuous normal components; broken RT does not") {
  Mesh m = Mesh::cartesian(3, 3, {0, 0}, {1, 1}, 2);
  m.distort_taylor_green(0.15, 40);

  const FiniteElementSpace rt(m, SpaceKind::RT, 1);
  const GridFunction u = random_field(rt, 20240801u);
  const FiniteElementSpace brt(m, SpaceKind::BrokenRT, 1);
  const GridFunction ub = random_field(brt, 20240802u);

  double max_jump_rt = 0.0, max_jump_brt = 0.0, max_tangent_jump_rt = 0.0;
  for (int f = 0; f < m.n_faces(); ++f) {
    const Face& face = m.face(f);
    if (face.boundary()) continue;
    for (double s : {0.12, 0.5, 0.83}) {
      const FaceFrame fr = m.face_frame(f, s);
      const ElementFrame f1 = m.element_frame(face.elem1, fr.xi1);
      const ElementFrame f2 = m.element_frame(face.elem2, fr.xi2);
      const Vec2 t{-fr.n.y, fr.n.x};

      const Vec2 v1 = eval_vector(u, face.elem1, f1, fr.xi1);
      const Vec2 v2 = eval_vector(u, face.elem2, f2, fr.xi2);
      max_jump_rt = std::max(max_jump_rt, std::abs(v1.dot(fr.n) - v2.dot(fr.n)));
      max_tangent_jump_rt = std::max(max_tangent_jump_rt, std::abs(v1.dot(t) - v2.dot(t)));

      const Vec2 w1 = eval_vector(ub, face.elem1, f1, fr.xi1);
      const Vec2 w2 = eval_vector(ub, face.elem2, f2, fr.xi2);
      max_jump_brt = std::max(max_jump_brt, std::abs(w1.dot(fr.n) - w2.dot(fr.n)));
    }
  }
  CHECK(max_jump_rt < 1e-11);
  // Tangential components are allowed to jump (and generically do).
  CHECK(max_tangent_jump_rt > 1e-3);
  CHECK(max_jump_brt > 1e-3);
}

TEST_CASE("CG fields are single-valued across interior faces") {
  Mesh m = Mesh::cartesian(4, 3, {0, 0}, {1, 1}, 2);
  m.distort_taylor_green(0.2, 50);

  const FiniteElementSpace cg(m, SpaceKind::CG, 3);
  const GridFunction u = random_field(cg, 7u);

  double max_jump = 0.0;
  for (int f = 0; f < m.n_faces(); ++f) {
    const Face& face = m.face(f);
    if (face.boundary()) continue;
    for (double s : {0.0, 0.3, 0.71, 1.0}) {
      const FaceFrame fr = m.face_frame(f, s);
      const double a = eval_scalar(u, face.elem1, fr.xi1);
      const double b = eval_scalar(u, face.elem2, fr.xi2);
      max_jump = std::max(max_jump, std::abs(a - b));
    }
  }
  CHECK(max_jump < 1e-12);
}

TEST_CASE("face dof slots follow the documented 1D node ordering") {
  const Mesh m = Mesh::cartesian(2, 2, {0, 0}, {1, 1});

  SUBCASE("CG slots sit on Gauss-Lobatto nodes of the face") {
    const int p = 3;
    const FiniteElementSpace cg(m, SpaceKind::CG, p);
    const std::vector<double> nodes = gauss_lobatto_nodes(p + 1);
    std::vector<double> val;
    for (int lf = 0; lf < 4; ++lf) {
      const std::vector<int>& slots = cg.local_face_dofs(lf);
      REQUIRE(static_cast<int>(slots.size()) == p + 1);
      for (int k = 0; k <= p; ++k) {
        cg.eval_scalar(Mesh::face_point(lf, nodes[k]), val);
        CHECK(val[slots[k]] == doctest::Approx(1.0).epsilon(1e-12));
        for (int j = 0; j <= p; ++j)
          if (j != k) CHECK(std::abs(val[slots[j]]) < 1e-12);
      }
    }
  }

  SUBCASE("RT normal slots sit on Gauss nodes and have unit normal component") {
    const int p = 2;
    const FiniteElementSpace rt(m, SpaceKind::RT, p);
    const std::vector<double> nodes = gauss_legendre_nodes(p + 1);
    std::vector<Vec2> val;
    for (int lf = 0; lf < 4; ++lf) {
      const std::vector<int>& slots = rt.local_face_dofs(lf);
      REQUIRE(static_cast<int>(slots.size()) == p + 1);
      const Vec2 nhat = Mesh::face_ref_normal(lf);
      for (int k = 0; k <= p; ++k) {
        rt.eval_vector(Mesh::face_point(lf, nodes[k]), val);
        CHECK(std::abs(val[slots[k]].dot(nhat)) == doctest::Approx(1.0).epsilon(1e-12));
        for (int j = 0; j <= p; ++j)
          if (j != k) CHECK(std::abs(val[slots[j]].dot(nhat)) < 1e-12);
      }
    }
  }
}

TEST_CASE("Piola transforms on a curved mesh match finite differences") {
  Mesh m = Mesh::cartesian(4, 4, {0, 0}, {1, 1}, 3);
  m.distort_taylor_green(0.3 * M_PI, 300);

  const FiniteElementSpace rt(m, SpaceKind::RT, 2);
  const GridFunction u = random_field(rt, 99u);

  const auto value_at = [&](int e, const Vec2& xi) {
    const ElementFrame fr = m.element_frame(e, xi);
    return eval_vector(u, e, fr, xi);
  };

  const double h = 1e-5;
  const Vec2 samples[] = {{0.37, 0.45}, {0.5, 0.5}, {0.81, 0.22}};
  for (int e : {0, 5, 10, 15}) {
    for (const Vec2& xi : samples) {
      const ElementFrame2 fr = m.element_frame2(e, xi);

      // dv/dxi by central differences of the physical value, then
      // chain rule: grad_x v = (dv/dxi) Finv.
      const Vec2 dvx = (1.0 / (2.0 * h)) * (value_at(e, {xi.x + h, xi.y}) - value_at(e, {xi.x - h, xi.y}));
      const Vec2 dvy = (1.0 / (2.0 * h)) * (value_at(e, {xi.x, xi.y + h}) - value_at(e, {xi.x, xi.y - h}));
      const Mat2 g_num = Mat2(dvx.x, dvy.x, dvx.y, dvy.y) * fr.Finv;

      // Analytic gradient assembled from the per-basis Piola gradient.
      std::vector<Vec2> vhat;
      std::vector<double> div_ref;
      std::vector<Mat2> grad_ref;
      rt.eval_vector(xi, vhat, div_ref, grad_ref);
      const std::vector<int>& dofs = rt.element_dofs(e);
      const std::vector<double>& signs = rt.element_signs(e);
      Mat2 g_exact;
      double div_exact = 0.0;
      for (int i = 0; i < rt.n_local_dofs(); ++i) {
        const double c = u.coeff[dofs[i]] * signs[i];
        g_exact = g_exact + FiniteElementSpace::piola_grad(fr, vhat[i], grad_ref[i]) * c;
        div_exact += c * FiniteElementSpace::piola_div(fr, div_ref[i]);
      }

      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          CHECK(g_exact.a[r][c] == doctest::Approx(g_num.a[r][c]).epsilon(5e-6).scale(1.0));

      // The divergence is the trace of the gradient, and eval_vector_div
      // agrees with the basis-assembled value.
      CHECK(g_exact.trace() == doctest::Approx(div_exact).epsilon(1e-10));
      CHECK(eval_vector_div(u, e, fr, xi) == doctest::Approx(div_exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("trace basis is a partition of unity") {
  const Mesh m = Mesh::cartesian(3, 3, {0, 0}, {1, 1});
  for (int p : {1, 2, 3}) {
    const FiniteElementSpace tr(m, SpaceKind::Trace, p);
    std::vector<double> val;
    for (double s : {0.0, 0.21, 0.5, 0.94, 1.0}) {
      tr.eval_trace(s, val);
      REQUIRE(static_cast<int>(val.size()) == p + 1);
      double sum = 0.0;
      for (double v : val) sum += v;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("point evaluation locates elements and rejects outside points") {
  const Mesh m = Mesh::cartesian(5, 4, {0, 0}, {1, 1});
  const FiniteElementSpace dg(m, SpaceKind::DG, 1);
  const auto f = [](Vec2 x) { return 2.0 * x.x - 3.0 * x.y + 1.0; };
  const GridFunction u = l2_project(dg, f);

  for (const Vec2 x : {Vec2{0.03, 0.97}, Vec2{0.5, 0.5}, Vec2{0.77, 0.13}})
    CHECK(eval_scalar_at(u, x) == doctest::Approx(f(x)).epsilon(1e-12));

  CHECK_THROWS_AS(eval_scalar_at(u, {1.5, 0.5}), std::runtime_error);
}

TEST_CASE("grid functions round-trip through save and load") {
  const Mesh m = Mesh::cartesian(2, 2, {0, 0}, {1, 1});
  const FiniteElementSpace s(m, SpaceKind::CG, 2);
  const GridFunction u = random_field(s, 3u);

  std::stringstream ss;
  u.save(ss);
  const GridFunction v = GridFunction::load(ss, s);
  REQUIRE(v.coeff.size() == u.coeff.size());
  for (std::size_t i = 0; i < u.coeff.size(); ++i)
    CHECK(v.coeff[i] == doctest::Approx(u.coeff[i]).epsilon(1e-14));
}
