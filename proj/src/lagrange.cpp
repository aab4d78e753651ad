#include "smm/lagrange.hpp"

#include <cmath>
#include <stdexcept>

namespace smm {

namespace {

// Legendre polynomial P_n and derivative P_n' at x (on [-1,1]).
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) { p = 1.0; dp = 0.0; return; }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

std::vector<double> gauss_legendre_nodes(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_nodes: n >= 1 required");
  std::vector<double> x(n);
  for (int i = 0; i < n / 2 + n % 2; ++i) {
    double t = std::cos(M_PI * (4.0 * i + 3.0) / (4.0 * n + 2.0));
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre(n, t, p, dp);
      const double dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[n - 1 - i] = 0.5 * (1.0 + t);
    x[i] = 0.5 * (1.0 - t);
  }
  return x;
}

std::vector<double> gauss_legendre_weights(int n) {
  const auto x = gauss_legendre_nodes(n);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * x[i] - 1.0;
    double p, dp;
    legendre(n, t, p, dp);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);  // = (2/((1-t^2) P'^2)) / 2 for [0,1]
  }
  return w;
}

std::vector<double> gauss_lobatto_nodes(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto_nodes: n >= 2 required");
  std::vector<double> x(n);
  x[0] = 0.0;
  x[n - 1] = 1.0;
  // Interior nodes: roots of P'_{n-1}, Newton from Chebyshev-Lobatto guesses.
  for (int i = 1; i < n - 1; ++i) {
    double t = std::cos(M_PI * (n - 1 - i) / (n - 1.0));
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre(n - 1, t, p, dp);
      // f = P'_{n-1}, f' from the Legendre ODE: (1-t^2) P'' = 2t P' - n(n-1) P
      const double ddp = (2.0 * t * dp - (n - 1.0) * n * p) / (1.0 - t * t);
      const double dt = dp / ddp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = 0.5 * (1.0 + t);
  }
  return x;
}

std::vector<double> chebyshev_points(int n) {
  if (n < 2) throw std::invalid_argument("chebyshev_points: n >= 2 required");
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = 0.5 * (1.0 - std::cos(M_PI * j / (n - 1.0)));
  return x;
}

Lagrange1D::Lagrange1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  const int n = size();
  if (n < 1) throw std::invalid_argument("Lagrange1D: empty node set");
  bary_.assign(n, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) bary_[i] /= (nodes_[i] - nodes_[j]);

  // Differentiation matrices: d1_[i][j] = l_j'(t_i); d2 = d1 * d1 (exact on
  // the polynomial space).
  d1_.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      d1_[i][j] = (bary_[j] / bary_[i]) / (nodes_[i] - nodes_[j]);
      diag -= d1_[i][j];
    }
    d1_[i][i] = diag;
  }
  d2_.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) d2_[i][j] += d1_[i][k] * d1_[k][j];
}

int Lagrange1D::near_node(double x) const {
  for (int i = 0; i < size(); ++i)
    if (std::abs(x - nodes_[i]) < 1e-13) return i;
  return -1;
}

void Lagrange1D::eval(double x, std::vector<double>& values) const {
  const int n = size();
  values.assign(n, 0.0);
  const int hit = near_node(x);
  if (hit >= 0) {
    values[hit] = 1.0;
    return;
  }
  // l_i(x) = (w_i / (x - t_i)) / sum_j (w_j / (x - t_j)) would be the second
  // barycentric form; the first form below avoids the common denominator.
  double prod = 1.0;
  for (int j = 0; j < n; ++j) prod *= (x - nodes_[j]);
  for (int i = 0; i < n; ++i) values[i] = prod * bary_[i] / (x - nodes_[i]);
}

void Lagrange1D::eval(double x, std::vector<double>& values,
                      std::vector<double>& deriv) const {
  const int n = size();
  eval(x, values);
  deriv.assign(n, 0.0);
  const int hit = near_node(x);
  if (hit >= 0) {
    for (int j = 0; j < n; ++j) deriv[j] = d1_[hit][j];
    return;
  }
  for (int i = 0; i < n; ++i) {
    double s1 = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) s1 += 1.0 / (x - nodes_[j]);
    deriv[i] = values[i] * s1;
  }
}

void Lagrange1D::eval(double x, std::vector<double>& values, std::vector<double>& deriv,
                      std::vector<double>& deriv2) const {
  const int n = size();
  eval(x, values, deriv);
  deriv2.assign(n, 0.0);
  const int hit = near_node(x);
  if (hit >= 0) {
    for (int j = 0; j < n; ++j) deriv2[j] = d2_[hit][j];
    return;
  }
  for (int i = 0; i < n; ++i) {
    double s1 = 0.0, s2 = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double r = 1.0 / (x - nodes_[j]);
      s1 += r;
      s2 += r * r;
    }
    deriv2[i] = values[i] * (s1 * s1 - s2);
  }
}

}  // namespace smm
