#include <cmath>

#include "doctest.h"
#include "smm/quadrature.hpp"

using namespace smm;

namespace {

double pow_int(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

}  // namespace

TEST_CASE("1d gauss rules integrate monomials exactly up to the requested order") {
  for (int order = 0; order <= 13; ++order) {
    const QuadratureRule1D rule = make_quadrature_1d(order);
    // smallest rule: n points are exact through degree 2n-1
    CHECK(rule.size() == order / 2 + 1);
    for (int d = 0; d <= order; ++d) {
      double s = 0.0;
      for (int q = 0; q < rule.size(); ++q) s += rule.weights[q] * pow_int(rule.points[q], d);
      CHECK(s == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("1d gauss points lie inside (0,1), increasing, with positive weights") {
  const QuadratureRule1D rule = make_quadrature_1d(9);
  double prev = 0.0;
  double wsum = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    CHECK(rule.points[q] > prev);
    CHECK(rule.points[q] < 1.0);
    CHECK(rule.weights[q] > 0.0);
    prev = rule.points[q];
    wsum += rule.weights[q];
  }
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("2d tensor rules integrate Q_{k,k} exactly") {
  for (int order : {1, 2, 4, 7}) {
    const QuadratureRule2D rule = make_quadrature_2d(order);
    const int n1 = order / 2 + 1;
    CHECK(rule.size() == n1 * n1);
    for (int a = 0; a <= order; ++a) {
      for (int b = 0; b <= order; ++b) {
        double s = 0.0;
        for (int q = 0; q < rule.size(); ++q)
          s += rule.weights[q] * pow_int(rule.points[q].x, a) * pow_int(rule.points[q].y, b);
        CHECK(s == doctest::Approx(1.0 / ((a + 1.0) * (b + 1.0))).epsilon(1e-13));
      }
    }
  }
}
