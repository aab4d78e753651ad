#include "smm/anderson.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <deque>
#include <stdexcept>

namespace smm {

namespace {

double max_norm_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

FixedPointResult fixed_point_solve(const std::function<Vector(const Vector&)>& g,
                                   const Vector& x0, const FixedPointOptions& opt) {
  if (opt.max_iter < 1) throw std::invalid_argument("fixed_point_solve: max_iter must be >= 1");
  const int n = static_cast<int>(x0.size());
  FixedPointResult res;
  res.x = x0;

  // Histories of differences of residuals f_k = g(x_k) - x_k and of map
  // values g_k; at most `anderson_space` columns are retained.
  std::deque<Vector> df_hist, dg_hist;
  Vector f_prev, g_prev;
  bool have_prev = false;

  Vector x = x0;
  for (int it = 0; it < opt.max_iter; ++it) {
    Vector gx = g(x);
    res.iterations = it + 1;

    Vector x_next;
    if (opt.anderson_space == 0) {
      x_next = gx;  // plain Picard, bit-identical
    } else {
      Vector f(n);
      for (int i = 0; i < n; ++i) f[i] = gx[i] - x[i];
      if (have_prev) {
        Vector df(n), dg(n);
        for (int i = 0; i < n; ++i) {
          df[i] = f[i] - f_prev[i];
          dg[i] = gx[i] - g_prev[i];
        }
        df_hist.push_back(std::move(df));
        dg_hist.push_back(std::move(dg));
        while (static_cast<int>(df_hist.size()) > opt.anderson_space) {
          df_hist.pop_front();
          dg_hist.pop_front();
        }
      }
      f_prev = f;
      g_prev = gx;
      have_prev = true;

      const int m = static_cast<int>(df_hist.size());
      if (m == 0) {
        x_next = gx;
      } else {
        Eigen::MatrixXd dfm(n, m);
        Eigen::VectorXd rhs(n);
        for (int j = 0; j < m; ++j)
          for (int i = 0; i < n; ++i) dfm(i, j) = df_hist[j][i];
        for (int i = 0; i < n; ++i) rhs(i) = f[i];
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dfm);
        if (qr.rank() < m) {
          // Degenerate history: restart the acceleration.
          df_hist.clear();
          dg_hist.clear();
          x_next = gx;
        } else {
          Eigen::VectorXd gamma = qr.solve(rhs);
          x_next = gx;
          for (int j = 0; j < m; ++j) {
            const double gj = gamma(j);
            for (int i = 0; i < n; ++i) x_next[i] -= gj * dg_hist[j][i];
          }
        }
      }
    }

    const double delta = max_norm_diff(x_next, x);
    res.deltas.push_back(delta);
    res.final_delta = delta;
    x = std::move(x_next);
    if (delta < opt.tol) {
      res.converged = true;
      break;
    }
  }
  res.x = std::move(x);
  return res;
}

}  // namespace smm
