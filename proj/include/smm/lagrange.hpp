#pragma once

#include <vector>

namespace smm {

/// Node families for 1D interpolation / quadrature, all on [0, 1].
std::vector<double> gauss_legendre_nodes(int n);
std::vector<double> gauss_legendre_weights(int n);
std::vector<double> gauss_lobatto_nodes(int n);

/// Chebyshev-spaced mesh lines on [0, 1]: x_j = (1 - cos(pi j / (n-1))) / 2.
std::vector<double> chebyshev_points(int n);

/// Nodal Lagrange basis on a fixed 1D node set, evaluated via the barycentric
/// form. Evaluation exactly at a node falls back to precomputed
/// differentiation matrices so no division by zero occurs.
class Lagrange1D {
 public:
  explicit Lagrange1D(std::vector<double> nodes);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }

  /// values[i] = l_i(x)
  void eval(double x, std::vector<double>& values) const;
  /// also first derivatives
  void eval(double x, std::vector<double>& values, std::vector<double>& deriv) const;
  /// also second derivatives
  void eval(double x, std::vector<double>& values, std::vector<double>& deriv,
            std::vector<double>& deriv2) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> bary_;           // barycentric weights
  std::vector<std::vector<double>> d1_, d2_;  // nodal differentiation matrices
  int near_node(double x) const;
};

}  // namespace smm
