#include "smm/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace smm {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         const std::vector<Triplet>& trips) {
  SparseMatrix m(rows, cols);
  for (const auto& t : trips)
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::out_of_range("SparseMatrix::from_triplets: index out of range");
  std::vector<int> order(trips.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return trips[a].row != trips[b].row ? trips[a].row < trips[b].row
                                        : trips[a].col < trips[b].col;
  });
  for (size_t k = 0; k < order.size();) {
    const Triplet& t = trips[order[k]];
    double v = 0.0;
    size_t j = k;
    for (; j < order.size() && trips[order[j]].row == t.row && trips[order[j]].col == t.col; ++j)
      v += trips[order[j]].value;
    m.col_idx_.push_back(t.col);
    m.vals_.push_back(v);
    ++m.row_ptr_[t.row + 1];
    k = j;
  }
  for (int i = 0; i < rows; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
  return m;
}

void SparseMatrix::multiply(const Vector& x, Vector& y) const {
  y.assign(rows_, 0.0);
  multiply_add(x, y);
}

void SparseMatrix::multiply_add(const Vector& x, Vector& y) const {
  if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_)
    throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += vals_[k] * x[col_idx_[k]];
    y[i] += s;
  }
}

void SparseMatrix::multiply_transpose(const Vector& x, Vector& y) const {
  if (static_cast<int>(x.size()) != rows_)
    throw std::invalid_argument("SparseMatrix::multiply_transpose: size mismatch");
  y.assign(cols_, 0.0);
  for (int i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      y[col_idx_[k]] += vals_[k] * x[i];
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> trips;
  trips.reserve(nnz());
  for (int i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      trips.push_back({col_idx_[k], i, vals_[k]});
  return from_triplets(cols_, rows_, trips);
}

Vector SparseMatrix::row_sums() const {
  Vector s(rows_, 0.0);
  for (int i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s[i] += vals_[k];
  return s;
}

double SparseMatrix::element(int i, int j) const {
  for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    if (col_idx_[k] == j) return vals_[k];
  return 0.0;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : vals_) m = std::max(m, std::abs(v));
  return m;
}

void SparseMatrix::gauss_seidel(const Vector& b, Vector& x, bool forward) const {
  if (rows_ != cols_) throw std::invalid_argument("gauss_seidel: square matrix required");
  auto sweep_row = [&](int i) {
    double s = b[i], diag = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] == i)
        diag = vals_[k];
      else
        s -= vals_[k] * x[col_idx_[k]];
    }
    if (diag == 0.0) throw std::runtime_error("gauss_seidel: zero diagonal");
    x[i] = s / diag;
  };
  if (forward)
    for (int i = 0; i < rows_; ++i) sweep_row(i);
  else
    for (int i = rows_ - 1; i >= 0; --i) sweep_row(i);
}

void SparseMatrix::export_coordinate(std::ostream& os) const {
  os.precision(17);
  os << rows_ << " " << cols_ << " " << nnz() << "\n";
  for (int i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      os << i << " " << col_idx_[k] << " " << vals_[k] << "\n";
}

Vector lump_mass(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("lump_mass: square matrix required");
  Vector d = m.row_sums();
  for (double v : d)
    if (v <= 0.0) throw std::invalid_argument("lump_mass: non-positive lumped entry");
  return d;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void axpy(double a, const Vector& x, Vector& y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace smm
