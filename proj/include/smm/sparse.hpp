#pragma once

#include <iosfwd>
#include <vector>

namespace smm {

using Vector = std::vector<double>;

struct Triplet {
  int row = 0, col = 0;
  double value = 0.0;
};

/// Compressed sparse row matrix. Column indices within each row are sorted
/// and duplicate-free; assembly from triplets sums duplicates.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  static SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& trips);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(vals_.size()); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return vals_; }
  std::vector<double>& values() { return vals_; }

  void multiply(const Vector& x, Vector& y) const;           // y = A x
  void multiply_add(const Vector& x, Vector& y) const;       // y += A x
  void multiply_transpose(const Vector& x, Vector& y) const; // y = A^T x

  SparseMatrix transpose() const;

  /// Row sums as a diagonal (mass lumping). Throws if a lumped entry is zero
  /// for a square matrix intended as a preconditioner block.
  Vector row_sums() const;

  double element(int i, int j) const;  // 0 if not stored

  /// max |A_ij| over stored entries.
  double max_abs() const;

  /// One Gauss-Seidel sweep on A x = b (forward, backward, or symmetric).
  /// Requires stored nonzero diagonal.
  void gauss_seidel(const Vector& b, Vector& x, bool forward) const;

  /// Coordinate-format text export: "rows cols nnz" then "i j value" lines.
  void export_coordinate(std::ostream& os) const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> col_idx_;
  std::vector<double> vals_;
};

/// Diagonal matrix from mass lumping: diag entries are row sums. Throws on a
/// non-positive lumped entry (the lumped mass must stay SPD).
Vector lump_mass(const SparseMatrix& m);

// small vector helpers shared by the solvers
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
double norm_inf(const Vector& a);
void axpy(double a, const Vector& x, Vector& y);  // y += a x

}  // namespace smm
