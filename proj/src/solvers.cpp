#include "smm/solvers.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace smm {

namespace {
constexpr double kBreakdown = 1e-30;

Eigen::SparseMatrix<double> to_eigen(const SparseMatrix& a) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(a.nnz());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      trips.emplace_back(i, a.col_idx()[k], a.values()[k]);
  Eigen::SparseMatrix<double> m(a.rows(), a.cols());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

SparseMatrix from_eigen(const Eigen::SparseMatrix<double>& m) {
  std::vector<Triplet> trips;
  trips.reserve(m.nonZeros());
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      trips.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
  return SparseMatrix::from_triplets(static_cast<int>(m.rows()), static_cast<int>(m.cols()),
                                     trips);
}

SolveReport cg_solve(const LinearOperator& a, const Vector& b, Vector& x,
                     const KrylovOptions& opt, const LinearOperator* precond) {
  SolveReport rep;
  const int n = a.rows();
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    x.assign(n, 0.0);
    rep.converged = true;
    return rep;
  }
  Vector r(n), z(n), p(n), ap(n);
  a.apply(x, r);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  if (precond)
    precond->apply(r, z);
  else
    z = r;
  p = z;
  double rz = dot(r, z);
  for (int it = 0; it < opt.max_iter; ++it) {
    rep.residual = norm2(r) / bnorm;
    if (rep.residual < opt.tol) {
      rep.converged = true;
      return rep;
    }
    a.apply(p, ap);
    const double pap = dot(p, ap);
    if (std::abs(pap) < kBreakdown || std::abs(rz) < kBreakdown) {
      rep.breakdown = true;
      rep.note = "cg breakdown";
      return rep;
    }
    const double alpha = rz / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    if (precond)
      precond->apply(r, z);
    else
      z = r;
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rep.iterations = it + 1;
  }
  rep.residual = norm2(r) / bnorm;
  rep.converged = rep.residual < opt.tol;
  return rep;
}

// Preconditioned MINRES in the Lanczos/Givens form of Elman, Silvester &
// Wathen; the preconditioner must be SPD. Convergence is monitored through
// the preconditioned residual norm recurrence |eta|.
SolveReport minres_solve(const LinearOperator& a, const Vector& b, Vector& x,
                         const KrylovOptions& opt, const LinearOperator* precond) {
  SolveReport rep;
  const int n = a.rows();
  auto apply_precond = [&](const Vector& in, Vector& out) {
    if (precond)
      precond->apply(in, out);
    else
      out = in;
  };
  Vector zb(n);
  apply_precond(b, zb);
  const double bnorm_m = std::sqrt(std::max(0.0, dot(zb, b)));
  if (bnorm_m < kBreakdown) {
    x.assign(n, 0.0);
    rep.converged = true;
    return rep;
  }
  Vector v(n), v_prev(n, 0.0), v_next(n), z(n), z_next(n);
  a.apply(x, v);
  for (int i = 0; i < n; ++i) v[i] = b[i] - v[i];
  apply_precond(v, z);
  double gamma_sq = dot(z, v);
  if (gamma_sq < 0.0) {
    rep.breakdown = true;
    rep.note = "minres: preconditioner not positive definite";
    return rep;
  }
  double gamma = std::sqrt(gamma_sq), gamma_prev = 1.0;
  rep.residual = gamma / bnorm_m;
  if (rep.residual < opt.tol) {
    rep.converged = true;
    return rep;
  }
  double eta = gamma;
  double c = 1.0, c_prev = 1.0, s = 0.0, s_prev = 0.0;
  Vector w(n, 0.0), w_prev(n, 0.0), az(n);
  for (int it = 0; it < opt.max_iter; ++it) {
    for (int i = 0; i < n; ++i) z[i] /= gamma;
    a.apply(z, az);
    const double delta = dot(az, z);
    for (int i = 0; i < n; ++i)
      v_next[i] = az[i] - (delta / gamma) * v[i] - (gamma / gamma_prev) * v_prev[i];
    apply_precond(v_next, z_next);
    const double g2 = dot(z_next, v_next);
    if (g2 < 0.0) {
      rep.breakdown = true;
      rep.note = "minres: preconditioner not positive definite";
      return rep;
    }
    const double gamma_next = std::sqrt(g2);
    const double alpha0 = c * delta - c_prev * s * gamma;
    const double alpha1 = std::hypot(alpha0, gamma_next);
    const double alpha2 = s * delta + c_prev * c * gamma;
    const double alpha3 = s_prev * gamma;
    if (alpha1 < kBreakdown) {
      rep.breakdown = true;
      rep.note = "minres breakdown";
      return rep;
    }
    c_prev = c;
    s_prev = s;
    c = alpha0 / alpha1;
    s = gamma_next / alpha1;
    for (int i = 0; i < n; ++i) {
      const double wn = (z[i] - alpha3 * w_prev[i] - alpha2 * w[i]) / alpha1;
      w_prev[i] = w[i];
      w[i] = wn;
      x[i] += c * eta * wn;
    }
    eta = -s * eta;
    std::swap(v_prev, v);
    std::swap(v, v_next);
    std::swap(z, z_next);
    gamma_prev = gamma;
    gamma = gamma_next;
    rep.iterations = it + 1;
    rep.residual = std::abs(eta) / bnorm_m;
    if (rep.residual < opt.tol) {
      rep.converged = true;
      return rep;
    }
  }
  rep.converged = rep.residual < opt.tol;
  return rep;
}

SolveReport bicgstab_solve(const LinearOperator& a, const Vector& b, Vector& x,
                           const KrylovOptions& opt, const LinearOperator* precond) {
  SolveReport rep;
  const int n = a.rows();
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    x.assign(n, 0.0);
    rep.converged = true;
    return rep;
  }
  Vector r(n), rt(n), p(n, 0.0), v(n, 0.0), ph(n), s(n), sh(n), t(n);
  a.apply(x, r);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  rt = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    rep.residual = norm2(r) / bnorm;
    if (rep.residual < opt.tol) {
      rep.converged = true;
      return rep;
    }
    const double rho1 = dot(rt, r);
    if (std::abs(rho1) < kBreakdown || std::abs(omega) < kBreakdown) {
      rep.breakdown = true;
      rep.note = "bicgstab breakdown";
      return rep;
    }
    const double betaf = (rho1 / rho) * (alpha / omega);
    for (int i = 0; i < n; ++i) p[i] = r[i] + betaf * (p[i] - omega * v[i]);
    if (precond)
      precond->apply(p, ph);
    else
      ph = p;
    a.apply(ph, v);
    const double rtv = dot(rt, v);
    if (std::abs(rtv) < kBreakdown) {
      rep.breakdown = true;
      rep.note = "bicgstab breakdown";
      return rep;
    }
    alpha = rho1 / rtv;
    for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2(s) / bnorm < opt.tol) {
      axpy(alpha, ph, x);
      rep.iterations = it + 1;
      rep.residual = norm2(s) / bnorm;
      rep.converged = true;
      return rep;
    }
    if (precond)
      precond->apply(s, sh);
    else
      sh = s;
    a.apply(sh, t);
    const double tt = dot(t, t);
    if (tt < kBreakdown) {
      rep.breakdown = true;
      rep.note = "bicgstab breakdown";
      return rep;
    }
    omega = dot(t, s) / tt;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * ph[i] + omega * sh[i];
      r[i] = s[i] - omega * t[i];
    }
    rho = rho1;
    rep.iterations = it + 1;
  }
  rep.residual = norm2(r) / bnorm;
  rep.converged = rep.residual < opt.tol;
  return rep;
}

}  // namespace

SolveReport krylov_solve(const LinearOperator& a, const Vector& b, Vector& x,
                         const KrylovOptions& opt, const LinearOperator* precond) {
  if (a.rows() != a.cols()) throw std::invalid_argument("krylov_solve: square operator required");
  if (static_cast<int>(b.size()) != a.rows())
    throw std::invalid_argument("krylov_solve: rhs size mismatch");
  if (static_cast<int>(x.size()) != a.rows()) x.assign(a.rows(), 0.0);
  if (opt.kind == KrylovKind::MINRES && precond && !precond->symmetric())
    throw std::invalid_argument("krylov_solve: MINRES requires a symmetric preconditioner");
  switch (opt.kind) {
    case KrylovKind::CG: return cg_solve(a, b, x, opt, precond);
    case KrylovKind::MINRES: return minres_solve(a, b, x, opt, precond);
    case KrylovKind::BiCGStab: return bicgstab_solve(a, b, x, opt, precond);
  }
  throw std::logic_error("krylov_solve: unknown kind");
}

LinearOperator make_sgs_preconditioner(const SparseMatrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("make_sgs_preconditioner: square matrix required");
  return LinearOperator(
      a.rows(), a.cols(),
      [&a](const Vector& r, Vector& z) {
        z.assign(r.size(), 0.0);
        a.gauss_seidel(r, z, true);
        a.gauss_seidel(r, z, false);
      },
      /*symmetric=*/true);
}

struct DirectSolver::Impl {
  Kind kind;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  int n = 0;
};

DirectSolver::DirectSolver(const SparseMatrix& a, Kind kind) : impl_(new Impl) {
  if (a.rows() != a.cols()) throw std::invalid_argument("DirectSolver: square matrix required");
  impl_->kind = kind;
  impl_->n = a.rows();
  const Eigen::SparseMatrix<double> m = to_eigen(a);
  if (kind == Kind::LDLT) {
    impl_->ldlt.compute(m);
    if (impl_->ldlt.info() != Eigen::Success)
      throw std::runtime_error("DirectSolver: LDLT factorization failed");
  } else {
    impl_->lu.compute(m);
    if (impl_->lu.info() != Eigen::Success)
      throw std::runtime_error("DirectSolver: LU factorization failed");
  }
}

DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

int DirectSolver::size() const { return impl_->n; }

void DirectSolver::solve(const Vector& b, Vector& x) const {
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), b.size());
  Eigen::VectorXd xv;
  if (impl_->kind == Kind::LDLT)
    xv = impl_->ldlt.solve(bv);
  else
    xv = impl_->lu.solve(bv);
  x.assign(xv.data(), xv.data() + xv.size());
}

LinearOperator DirectSolver::as_operator() const {
  return LinearOperator(
      impl_->n, impl_->n, [this](const Vector& b, Vector& x) { solve(b, x); },
      /*symmetric=*/impl_->kind == Kind::LDLT);
}

void BlockSystem::apply_unscaled(const Vector& x, Vector& y) const {
  const Vector x1(x.begin(), x.begin() + n1);
  const Vector x2(x.begin() + n1, x.end());
  Vector y1(n1), t1(n1), y2(n2), t2(n2);
  Mt.multiply(x1, y1);
  G.multiply(x2, t1);
  axpy(1.0, t1, y1);
  D.multiply(x1, y2);
  Ma.multiply(x2, t2);
  axpy(1.0, t2, y2);
  y.resize(n1 + n2);
  std::copy(y1.begin(), y1.end(), y.begin());
  std::copy(y2.begin(), y2.end(), y.begin() + n1);
}

LinearOperator BlockSystem::scaled_operator() const {
  return LinearOperator(
      n1 + n2, n1 + n2,
      [this](const Vector& x, Vector& y) {
        apply_unscaled(x, y);
        for (int i = 0; i < n1; ++i) y[i] *= -3.0;
      },
      /*symmetric=*/true);
}

LinearOperator BlockSystem::unscaled_operator() const {
  return LinearOperator(n1 + n2, n1 + n2,
                        [this](const Vector& x, Vector& y) { apply_unscaled(x, y); },
                        /*symmetric=*/false);
}

BlockPreconditioner::BlockPreconditioner(const BlockSystem& sys, BlockPrecondKind kind)
    : sys_(&sys), kind_(kind) {
  // 3 Mt: the SPD block of the sign-scaled system.
  std::vector<Triplet> trips;
  for (int i = 0; i < sys.Mt.rows(); ++i)
    for (int k = sys.Mt.row_ptr()[i]; k < sys.Mt.row_ptr()[i + 1]; ++k)
      trips.push_back({i, sys.Mt.col_idx()[k], 3.0 * sys.Mt.values()[k]});
  mt_scaled_ = SparseMatrix::from_triplets(sys.Mt.rows(), sys.Mt.cols(), trips);

  // Schur complement with the lumped interaction matrix:
  // S = Ma - D lump(Mt)^{-1} G = Ma + (1/3) D lump(Mt)^{-1} D^T, SPD.
  const Vector lump = lump_mass(sys.Mt);
  Eigen::SparseMatrix<double> d = to_eigen(sys.D), g = to_eigen(sys.G), ma = to_eigen(sys.Ma);
  Eigen::VectorXd inv_lump(lump.size());
  for (size_t i = 0; i < lump.size(); ++i) inv_lump(i) = 1.0 / lump[i];
  Eigen::SparseMatrix<double> s = ma - (d * inv_lump.asDiagonal() * g).pruned();
  schur_ = from_eigen(s);
  schur_solver_ = std::make_unique<DirectSolver>(schur_, DirectSolver::Kind::LDLT);
}

void BlockPreconditioner::apply(const Vector& r, Vector& z) const {
  const int n1 = sys_->n1, n2 = sys_->n2;
  const Vector r1(r.begin(), r.begin() + n1);
  const Vector r2(r.begin() + n1, r.end());
  Vector z1(n1, 0.0), z2;
  z.resize(n1 + n2);
  if (kind_ == BlockPrecondKind::Diagonal) {
    // Symmetric GS sweep on 3 Mt keeps the preconditioner SPD for MINRES.
    mt_scaled_.gauss_seidel(r1, z1, true);
    mt_scaled_.gauss_seidel(r1, z1, false);
    schur_solver_->solve(r2, z2);
  } else {
    // Forward substitution on [Mt 0; D S].
    sys_->Mt.gauss_seidel(r1, z1, true);
    Vector dz(n2);
    sys_->D.multiply(z1, dz);
    Vector rhs(n2);
    for (int i = 0; i < n2; ++i) rhs[i] = r2[i] - dz[i];
    schur_solver_->solve(rhs, z2);
  }
  std::copy(z1.begin(), z1.end(), z.begin());
  std::copy(z2.begin(), z2.end(), z.begin() + n1);
}

LinearOperator BlockPreconditioner::as_operator() const {
  const int n = sys_->n1 + sys_->n2;
  return LinearOperator(n, n, [this](const Vector& r, Vector& z) { apply(r, z); },
                        /*symmetric=*/symmetric());
}

}  // namespace smm
