#pragma once

#include <functional>
#include <memory>
#include <string>

#include "smm/sparse.hpp"

namespace smm {

/// Matrix-free operator. `symmetric` is a structural hint used to validate
/// solver/preconditioner pairings (MINRES requires a symmetric positive
/// definite preconditioner).
class LinearOperator {
 public:
  using Apply = std::function<void(const Vector&, Vector&)>;

  LinearOperator() = default;
  LinearOperator(int rows, int cols, Apply apply, bool symmetric = false)
      : rows_(rows), cols_(cols), apply_(std::move(apply)), symmetric_(symmetric) {}

  /// View of a sparse matrix (the matrix must outlive the operator).
  static LinearOperator view(const SparseMatrix& a, bool symmetric = false) {
    return LinearOperator(a.rows(), a.cols(),
                          [&a](const Vector& x, Vector& y) { a.multiply(x, y); }, symmetric);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool symmetric() const { return symmetric_; }
  bool valid() const { return static_cast<bool>(apply_); }
  void apply(const Vector& x, Vector& y) const { apply_(x, y); }

 private:
  int rows_ = 0, cols_ = 0;
  Apply apply_;
  bool symmetric_ = false;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // relative residual at exit
  bool breakdown = false;
  std::string note;
};

enum class KrylovKind { CG, MINRES, BiCGStab };

struct KrylovOptions {
  KrylovKind kind = KrylovKind::CG;
  double tol = 1e-8;  // relative residual
  int max_iter = 5000;
};

/// Preconditioned Krylov solve of A x = b starting from the passed-in x
/// (warm start). The preconditioner approximates A^{-1}. Inner products
/// smaller than 1e-30 in magnitude flag a breakdown. MINRES with a
/// preconditioner not marked symmetric is rejected up front.
SolveReport krylov_solve(const LinearOperator& a, const Vector& b, Vector& x,
                         const KrylovOptions& opt, const LinearOperator* precond = nullptr);

/// Symmetric Gauss-Seidel preconditioner (one forward + one backward sweep
/// from a zero start); symmetric, and SPD when `a` is.
LinearOperator make_sgs_preconditioner(const SparseMatrix& a);

/// Sparse direct factorization (LDLT for symmetric matrices, LU otherwise).
class DirectSolver {
 public:
  enum class Kind { LDLT, LU };
  DirectSolver(const SparseMatrix& a, Kind kind);
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  void solve(const Vector& b, Vector& x) const;
  LinearOperator as_operator() const;
  int size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// The 2x2 block structure of the first-order (RT) moment system
/// [Mt G; D Ma][J; phi] = [g; f]. Mt is an SPD interaction matrix, D the
/// divergence block, and G equals -(1/3) D^T entrywise.
struct BlockSystem {
  SparseMatrix Mt, G, D, Ma;
  int n1 = 0, n2 = 0;  // current / scalar unknown counts

  /// Operator of the sign-scaled symmetric indefinite system
  /// [-3Mt  -3G; D  Ma] (note -3G = D^T), suitable for MINRES.
  LinearOperator scaled_operator() const;
  /// Operator of the unscaled system [Mt G; D Ma].
  LinearOperator unscaled_operator() const;
  /// Apply unscaled blocks to a stacked vector.
  void apply_unscaled(const Vector& x, Vector& y) const;
};

enum class BlockPrecondKind { Diagonal, LowerTriangular };

/// Block preconditioner for the RT system built from a diagonal lumping of
/// Mt: Schur complement S = Ma - D lump(Mt)^{-1} G (SPD) is factorized; the
/// Mt block is applied with a single Gauss-Seidel iteration (symmetric sweep
/// for the diagonal variant so the preconditioner stays SPD; forward sweep
/// for the triangular variant). The diagonal variant preconditions the
/// sign-scaled system (Mt block scaled by +3); the triangular variant the
/// unscaled system, and must never be paired with MINRES.
class BlockPreconditioner {
 public:
  BlockPreconditioner(const BlockSystem& sys, BlockPrecondKind kind);

  BlockPrecondKind kind() const { return kind_; }
  bool symmetric() const { return kind_ == BlockPrecondKind::Diagonal; }
  LinearOperator as_operator() const;

 private:
  void apply(const Vector& r, Vector& z) const;

  const BlockSystem* sys_;
  BlockPrecondKind kind_;
  SparseMatrix mt_scaled_;  // 3 Mt (diagonal variant GS target)
  SparseMatrix schur_;
  std::unique_ptr<DirectSolver> schur_solver_;
};

}  // namespace smm
