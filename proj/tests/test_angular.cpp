#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "smm/angular.hpp"

using namespace smm;

namespace {

constexpr double kPi = 3.14159265358979323846;

double moment(const AngularQuadrature& q, int ax, int ay, int az) {
  double s = 0.0;
  for (int d = 0; d < q.size(); ++d) {
    double t = q[d].w;
    for (int k = 0; k < ax; ++k) t *= q[d].x;
    for (int k = 0; k < ay; ++k) t *= q[d].y;
    for (int k = 0; k < az; ++k) t *= q[d].z;
    s += t;
  }
  return s;
}

}  // namespace

TEST_CASE("angular quadrature sizes and validation") {
  CHECK(build_angular_quadrature(2, 4).size() == 8);
  CHECK(build_angular_quadrature(6, 12).size() == 72);
  CHECK_THROWS_AS(build_angular_quadrature(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_angular_quadrature(2, 6), std::invalid_argument);
  CHECK_THROWS_AS(build_angular_quadrature(2, 0), std::invalid_argument);
}

TEST_CASE("directions are unit vectors in the upper half space") {
  const AngularQuadrature q = build_angular_quadrature(3, 8);
  for (int d = 0; d < q.size(); ++d) {
    const double n2 = q[d].x * q[d].x + q[d].y * q[d].y + q[d].z * q[d].z;
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q[d].z > 0.0);
    CHECK(q[d].w > 0.0);
  }
}

TEST_CASE("zeroth, first, and second moments") {
  for (auto [np, na] : {std::pair{2, 4}, std::pair{3, 8}, std::pair{4, 12}}) {
    const AngularQuadrature q = build_angular_quadrature(np, na);
    CHECK(moment(q, 0, 0, 0) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
    // odd planar moments vanish (azimuthal symmetry)
    CHECK(std::abs(moment(q, 1, 0, 0)) < 1e-13);
    CHECK(std::abs(moment(q, 0, 1, 0)) < 1e-13);
    CHECK(std::abs(moment(q, 1, 1, 0)) < 1e-13);
    CHECK(std::abs(moment(q, 1, 0, 1)) < 1e-13);
    CHECK(std::abs(moment(q, 0, 1, 1)) < 1e-13);
    // diagonal second moments equal (4*pi/3) for n_polar >= 2
    CHECK(moment(q, 2, 0, 0) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-13));
    CHECK(moment(q, 0, 2, 0) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-13));
    CHECK(moment(q, 0, 0, 2) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-13));
  }
}

TEST_CASE("planar antipodal symmetry: every (x,y) has a (-x,-y) partner") {
  const AngularQuadrature q = build_angular_quadrature(2, 4);
  for (int d = 0; d < q.size(); ++d) {
    bool found = false;
    for (int e = 0; e < q.size(); ++e) {
      if (std::abs(q[e].x + q[d].x) < 1e-14 && std::abs(q[e].y + q[d].y) < 1e-14 &&
          std::abs(q[e].z - q[d].z) < 1e-14 && std::abs(q[e].w - q[d].w) < 1e-14) {
        found = true;
        break;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("fourth moments: inexact for the coarse product rule, exact for 3x8") {
  // coarse 2x4 rule: frozen value 19*pi/36 (closed form of the 2-point
  // Gauss nodes against the four diagonal azimuths), not 4*pi/15
  const AngularQuadrature coarse = build_angular_quadrature(2, 4);
  CHECK(moment(coarse, 2, 2, 0) == doctest::Approx(19.0 * kPi / 36.0).epsilon(1e-13));
  CHECK(std::abs(moment(coarse, 2, 2, 0) - 4.0 * kPi / 15.0) > 0.5);

  // 3 polar x 8 azimuthal integrates all fourth moments exactly
  const AngularQuadrature rich = build_angular_quadrature(3, 8);
  CHECK(moment(rich, 4, 0, 0) == doctest::Approx(4.0 * kPi / 5.0).epsilon(1e-13));
  CHECK(moment(rich, 0, 4, 0) == doctest::Approx(4.0 * kPi / 5.0).epsilon(1e-13));
  CHECK(moment(rich, 2, 2, 0) == doctest::Approx(4.0 * kPi / 15.0).epsilon(1e-13));
  CHECK(moment(rich, 2, 0, 2) == doctest::Approx(4.0 * kPi / 15.0).epsilon(1e-13));
  CHECK(std::abs(moment(rich, 3, 1, 0)) < 1e-13);
  CHECK(std::abs(moment(rich, 1, 3, 0)) < 1e-13);
  CHECK(std::abs(moment(rich, 2, 1, 1)) < 1e-13);
}
