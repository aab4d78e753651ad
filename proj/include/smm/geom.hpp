#pragma once

#include <cmath>

namespace smm {

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double a) const { return {a * x, a * y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 operator*(double a, const Vec2& v) { return {a * v.x, a * v.y}; }

/// 2x2 matrix, row-major: a[row][col].
struct Mat2 {
  double a[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

  Mat2() = default;
  Mat2(double a00, double a01, double a10, double a11) {
    a[0][0] = a00; a[0][1] = a01; a[1][0] = a10; a[1][1] = a11;
  }

  double det() const { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

  Mat2 inverse() const {
    const double d = det();
    return {a[1][1] / d, -a[0][1] / d, -a[1][0] / d, a[0][0] / d};
  }

  /// Adjugate: adj(F) = det(F) * inv(F); entries are linear in F.
  Mat2 adjugate() const { return {a[1][1], -a[0][1], -a[1][0], a[0][0]}; }

  Mat2 transpose() const { return {a[0][0], a[1][0], a[0][1], a[1][1]}; }

  Vec2 apply(const Vec2& v) const {
    return {a[0][0] * v.x + a[0][1] * v.y, a[1][0] * v.x + a[1][1] * v.y};
  }

  /// Apply transpose without forming it.
  Vec2 apply_T(const Vec2& v) const {
    return {a[0][0] * v.x + a[1][0] * v.y, a[0][1] * v.x + a[1][1] * v.y};
  }

  Mat2 operator*(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        r.a[i][j] = a[i][0] * o.a[0][j] + a[i][1] * o.a[1][j];
    return r;
  }

  Mat2 operator+(const Mat2& o) const {
    return {a[0][0] + o.a[0][0], a[0][1] + o.a[0][1], a[1][0] + o.a[1][0], a[1][1] + o.a[1][1]};
  }

  Mat2 operator-(const Mat2& o) const {
    return {a[0][0] - o.a[0][0], a[0][1] - o.a[0][1], a[1][0] - o.a[1][0], a[1][1] - o.a[1][1]};
  }

  Mat2 operator*(double s) const {
    return {s * a[0][0], s * a[0][1], s * a[1][0], s * a[1][1]};
  }

  double trace() const { return a[0][0] + a[1][1]; }
};

/// Symmetric 2x2 tensor plus the out-of-plane zz component. The in-plane
/// block is what enters the moment discretizations; zz participates only in
/// trace identities of the full 3x3 tensor.
struct SymTensor {
  double xx = 0.0, xy = 0.0, yy = 0.0, zz = 0.0;

  Vec2 apply(const Vec2& n) const {
    return {xx * n.x + xy * n.y, xy * n.x + yy * n.y};
  }
  double trace3() const { return xx + yy + zz; }
};

}  // namespace smm
