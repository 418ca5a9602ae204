#include "magwell/eigensolver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "magwell/error.hpp"

namespace magwell {

std::string to_string(InnerSolver s) { return s == InnerSolver::kLdlt ? "ldlt" : "cg"; }

InnerSolver parse_inner_solver(const std::string& name) {
  if (name == "ldlt") return InnerSolver::kLdlt;
  if (name == "cg") return InnerSolver::kCg;
  throw DomainError("unknown inner solver '" + name + "' (expected ldlt or cg)");
}

struct ShiftedFactorization::Impl {
  Eigen::SparseMatrix<cdouble> A;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<cdouble>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  bool analyzed = false;
  bool factored = false;
};

ShiftedFactorization::ShiftedFactorization(const HermitianCsr& A) : impl_(std::make_unique<Impl>()) {
  impl_->A = A.to_eigen();
}

ShiftedFactorization::~ShiftedFactorization() = default;

void ShiftedFactorization::factor(double sigma) {
  if (!impl_->analyzed) {
    impl_->ldlt.analyzePattern(impl_->A);
    impl_->analyzed = true;
  }
  impl_->ldlt.setShift(-sigma);
  impl_->ldlt.factorize(impl_->A);
  if (impl_->ldlt.info() != Eigen::Success)
    throw ConvergenceError("LDL^T factorization of A - " + std::to_string(sigma) +
                           " I broke down (shift is an eigenvalue?)");
  impl_->factored = true;
  sigma_ = sigma;
}

std::int64_t ShiftedFactorization::negative_count() const {
  if (!impl_->factored) throw ConvergenceError("factor() has not been called");
  const auto D = impl_->ldlt.vectorD();
  std::int64_t c = 0;
  for (Eigen::Index i = 0; i < D.size(); ++i)
    if (D(i).real() < 0) ++c;
  return c;
}

Eigen::VectorXcd ShiftedFactorization::solve(const Eigen::VectorXcd& b) const {
  return impl_->ldlt.solve(b);
}

namespace {

// Inertia at E; a shift that hits an eigenvalue exactly is nudged downward,
// so the count stays that of the eigenvalues strictly below E.
std::int64_t inertia_at(ShiftedFactorization& f, double E) {
  try {
    f.factor(E);
  } catch (const ConvergenceError&) {
    f.factor(E - 1e-11 * std::max(1.0, std::abs(E)));
  }
  return f.negative_count();
}

}  // namespace

std::int64_t count_below(const HermitianCsr& A, double E) {
  ShiftedFactorization f(A);
  return inertia_at(f, E);
}

namespace {

using Op = std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

Eigen::VectorXcd random_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> N01;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cdouble(N01(rng), N01(rng));
  return v / v.norm();
}

void matvec(const HermitianCsr& A, const Eigen::VectorXcd& x, Eigen::VectorXcd& y, int workers) {
  y.resize(x.size());
  A.matvec(std::span<const cdouble>(x.data(), static_cast<std::size_t>(x.size())),
           std::span<cdouble>(y.data(), static_cast<std::size_t>(y.size())), workers);
}

// Jacobi-preconditioned conjugate gradients for (A - sigma) x = b.
struct PcgSolver {
  const HermitianCsr& A;
  double sigma;
  double tol;
  int max_iter;
  int workers;
  Eigen::VectorXd inv_diag;
  long total = 0;

  PcgSolver(const HermitianCsr& A_, double sigma_, double tol_, int max_iter_, int workers_)
      : A(A_), sigma(sigma_), tol(tol_), max_iter(max_iter_), workers(workers_) {
    inv_diag.resize(A.n);
    for (std::int64_t r = 0; r < A.n; ++r) {
      double d = 0.0;
      for (auto p = A.row_ptr[static_cast<std::size_t>(r)]; p < A.row_ptr[static_cast<std::size_t>(r) + 1]; ++p)
        if (A.col[static_cast<std::size_t>(p)] == r) d = A.val[static_cast<std::size_t>(p)].real();
      d -= sigma;
      if (!(d > 0)) throw ConvergenceError("CG needs A - shift positive definite (diagonal entry " +
                                           std::to_string(d) + ")");
      inv_diag(r) = 1.0 / d;
    }
  }

  void apply(const Eigen::VectorXcd& b, Eigen::VectorXcd& x) {
    x = Eigen::VectorXcd::Zero(b.size());
    Eigen::VectorXcd r = b, z = inv_diag.cwiseProduct(r), p = z, Ap;
    cdouble rz = r.dot(z);
    const double bnorm = b.norm();
    for (int it = 0; it < max_iter; ++it) {
      matvec(A, p, Ap, workers);
      Ap -= sigma * p;
      const cdouble alpha = rz / p.dot(Ap);
      x += alpha * p;
      r -= alpha * Ap;
      ++total;
      if (r.norm() <= tol * bnorm) return;
      z = inv_diag.cwiseProduct(r);
      const cdouble rz_new = r.dot(z);
      p = z + (rz_new / rz) * p;
      rz = rz_new;
    }
    throw ConvergenceError("CG stagnated after " + std::to_string(max_iter) +
                           " iterations (relative residual " + std::to_string(r.norm() / bnorm) + ")");
  }
};

// Thick-restart Lanczos for the m eigenvalues of largest modulus of the
// Hermitian operator `op`; pairs come back in order of decreasing |theta|.
struct RitzResult {
  std::vector<double> theta;
  std::vector<Eigen::VectorXcd> x;
  bool converged = false;
  int iterations = 0;
  int restarts = 0;
};

struct LanczosControl {
  int m = 1;
  int basis = 40;
  int max_restarts = 100;
  std::function<double(const Eigen::VectorXcd&)> shifted_norm;  // ||(A - sigma) v||
  std::function<double(double)> tol_lambda;                     // allowed ||A x - lambda x||
  std::function<bool(double, const Eigen::VectorXcd&)> accept;  // direct residual check
};

// With OP = (A - sigma)^{-1} and OP V = V S + beta v_p e^T, a Ritz pair
// (theta, x = V y) satisfies ||A x - lambda x|| = |beta y_p| ||(A - sigma) v_p|| / |theta|.
// A pair counts as converged once that is below slack * tol_lambda(theta);
// `accept` then confirms the residual directly. On running out of restarts
// the current best pairs are returned with converged = false.
RitzResult lanczos_largest(const Op& op, const Eigen::VectorXcd& start, const LanczosControl& ctl,
                           std::mt19937_64& rng) {
  const Eigen::Index n = start.size();
  const int p = ctl.basis, m = ctl.m;
  Eigen::MatrixXcd V(n, p + 1);
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(p, p);
  V.col(0) = start / start.norm();
  int k = 0;
  double slack = 0.1;
  RitzResult out;
  Eigen::VectorXcd w;
  for (int restart = 0;; ++restart) {
    double last_beta = 0.0;
    for (int j = k; j < p; ++j) {
      op(V.col(j), w);
      ++out.iterations;
      Eigen::VectorXcd c = V.leftCols(j + 1).adjoint() * w;
      w.noalias() -= V.leftCols(j + 1) * c;
      const Eigen::VectorXcd c2 = V.leftCols(j + 1).adjoint() * w;
      w.noalias() -= V.leftCols(j + 1) * c2;
      c += c2;
      S.col(j).head(j + 1) = c;
      double beta = w.norm();
      const double scale = std::max(c.cwiseAbs().maxCoeff(), 1e-300);
      if (beta <= 1e-13 * scale) {
        // Invariant subspace: continue with a fresh, decoupled direction.
        beta = 0.0;
        if (j + 1 < n) {
          Eigen::VectorXcd r = random_unit(n, rng);
          for (int pass = 0; pass < 2; ++pass) r -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * r);
          V.col(j + 1) = r / r.norm();
        }
      } else {
        V.col(j + 1) = w / beta;
      }
      if (j + 1 < p) S(j + 1, j) = beta;
      else last_beta = beta;
    }
    const Eigen::MatrixXcd Sh = 0.5 * (S + S.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Sh);
    const auto& theta = es.eigenvalues();
    const auto& Y = es.eigenvectors();
    std::vector<int> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(theta(a)) > std::abs(theta(b)); });

    const double back = last_beta > 0 ? last_beta * ctl.shifted_norm(V.col(p)) : 0.0;
    bool converged = true;
    for (int i = 0; i < m; ++i) {
      const int c = order[static_cast<std::size_t>(i)];
      const double th = theta(c);
      if (th == 0.0 || back * std::abs(Y(p - 1, c)) > slack * ctl.tol_lambda(th) * std::abs(th))
        converged = false;
    }
    const bool last = restart >= ctl.max_restarts;
    if (converged || last) {
      RitzResult trial;
      trial.iterations = out.iterations;
      trial.restarts = restart;
      bool ok = true;
      for (int i = 0; i < m; ++i) {
        const int c = order[static_cast<std::size_t>(i)];
        Eigen::VectorXcd x = V.leftCols(p) * Y.col(c);
        x /= x.norm();
        if (!ctl.accept(theta(c), x)) ok = false;
        trial.theta.push_back(theta(c));
        trial.x.push_back(std::move(x));
      }
      trial.converged = ok;
      if (ok || last) return trial;
      slack *= 1e-2;
      if (slack < 1e-9) return trial;
    }
    const int keep = std::min(p - 2, m + (p - m) / 2);
    Eigen::MatrixXcd Ysel(p, keep);
    for (int i = 0; i < keep; ++i) Ysel.col(i) = Y.col(order[static_cast<std::size_t>(i)]);
    const Eigen::VectorXcd v_next = V.col(p);
    V.leftCols(keep) = V.leftCols(p) * Ysel;
    S.setZero();
    for (int i = 0; i < keep; ++i) {
      S(i, i) = theta(order[static_cast<std::size_t>(i)]);
      S(keep, i) = last_beta * Ysel(p - 1, i);
    }
    V.col(keep) = v_next;
    k = keep;
  }
}

int basis_size(const SolverOptions& o, std::int64_t n) {
  if (o.m < 1) throw DomainError("m must be >= 1");
  if (o.m >= n) throw RequestTooLargeError("m = " + std::to_string(o.m) + " >= dimension " + std::to_string(n));
  int p = o.max_basis > 0 ? o.max_basis : std::max(2 * o.m + 20, 40);
  p = static_cast<int>(std::min<std::int64_t>(p, n));
  if (2 * o.m > p)
    throw RequestTooLargeError("m = " + std::to_string(o.m) + " exceeds half the Krylov basis (" +
                               std::to_string(p) + ")");
  return p;
}

EigenResult finish(const HermitianCsr& A, double sigma, const SolverOptions& o, RitzResult r,
                   int iterations, int restarts, long inner,
                   std::chrono::steady_clock::time_point t0) {
  EigenResult res;
  res.shift = sigma;
  res.seed = o.seed;
  res.iterations = iterations;
  res.restarts = restarts;
  res.inner_iterations = inner;
  std::vector<int> idx(r.theta.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> lambda(r.theta.size());
  for (std::size_t i = 0; i < r.theta.size(); ++i) lambda[i] = sigma + 1.0 / r.theta[i];
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return lambda[a] < lambda[b]; });
  Eigen::VectorXcd Ax;
  for (int i : idx) {
    const auto iu = static_cast<std::size_t>(i);
    res.values.push_back(lambda[iu]);
    matvec(A, r.x[iu], Ax, o.workers);
    res.residuals.push_back((Ax - lambda[iu] * r.x[iu]).norm() / std::max(std::abs(lambda[iu]), 1e-300));
    res.vectors.push_back(std::move(r.x[iu]));
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// Restarts per shift before the shift is moved toward the lowest wanted Ritz value.
constexpr int kRestartsPerShift = 3;

EigenResult solve_shift_invert(const HermitianCsr& A, double sigma0, const SolverOptions& o,
                               bool lowest) {
  const auto t0 = std::chrono::steady_clock::now();
  double sigma = sigma0;
  LanczosControl ctl;
  ctl.m = o.m;
  ctl.basis = basis_size(o, A.n);
  ctl.tol_lambda = [&](double theta) { return o.tol * std::max(std::abs(sigma + 1.0 / theta), 1e-300); };
  ctl.shifted_norm = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd Av;
    matvec(A, v, Av, o.workers);
    return (Av - sigma * v).norm();
  };
  ctl.accept = [&](double theta, const Eigen::VectorXcd& x) {
    Eigen::VectorXcd Ax;
    matvec(A, x, Ax, o.workers);
    const double l = sigma + 1.0 / theta;
    return (Ax - l * x).norm() <= o.tol * std::max(std::abs(l), 1e-300);
  };
  std::mt19937_64 rng(o.seed);
  Eigen::VectorXcd start = random_unit(static_cast<Eigen::Index>(A.n), rng);
  int iterations = 0, restarts = 0;

  if (o.inner == InnerSolver::kCg) {
    PcgSolver cg(A, sigma, o.cg_tol, o.cg_max_iter, o.workers);
    const Op op = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { cg.apply(x, y); };
    ctl.max_restarts = o.max_restarts;
    RitzResult r = lanczos_largest(op, start, ctl, rng);
    if (!r.converged)
      throw ConvergenceError("Lanczos did not converge in " + std::to_string(o.max_restarts) +
                             " restarts (" + std::to_string(r.iterations) + " inner solves, " +
                             std::to_string(cg.total) + " CG iterations)");
    return finish(A, sigma, o, std::move(r), r.iterations, r.restarts, cg.total, t0);
  }

  ShiftedFactorization f(A);
  f.factor(sigma);
  if (lowest && f.negative_count() > 0)
    throw DomainError(std::to_string(f.negative_count()) + " eigenvalue(s) lie below the shift " +
                      std::to_string(sigma));
  const Op op = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y = f.solve(x); };
  while (true) {
    const int budget = o.max_restarts - restarts;
    ctl.max_restarts = lowest ? std::min(kRestartsPerShift, budget) : budget;
    RitzResult r = lanczos_largest(op, start, ctl, rng);
    iterations += r.iterations;
    restarts += r.restarts + 1;
    if (r.converged) return finish(A, sigma, o, std::move(r), iterations, restarts, 0, t0);
    if (restarts >= o.max_restarts || !lowest)
      throw ConvergenceError("Lanczos did not converge in " + std::to_string(restarts) +
                             " restarts (" + std::to_string(iterations) +
                             " applications of the shifted inverse, final shift " +
                             std::to_string(sigma) + ")");
    // Move the shift 99% of the way to the lowest wanted Ritz value; the
    // inertia count guarantees no eigenvalue is skipped.
    double lam_min = std::numeric_limits<double>::infinity();
    start = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(A.n));
    for (std::size_t i = 0; i < r.theta.size(); ++i) {
      lam_min = std::min(lam_min, sigma + 1.0 / r.theta[i]);
      start += r.x[i];
    }
    if (!(start.norm() > 0)) start = random_unit(static_cast<Eigen::Index>(A.n), rng);
    const double old = sigma;
    double step = 0.99 * (lam_min - old);
    for (int tries = 0; step > 0 && tries < 40; ++tries, step *= 0.5) {
      f.factor(old + step);
      if (f.negative_count() == 0) break;
    }
    if (!(step > 0) || f.negative_count() != 0) {
      step = 0.0;
      f.factor(old);
    }
    sigma = old + step;
  }
}

}  // namespace

EigenResult lowest_eigenpairs(const HermitianCsr& A, const SolverOptions& options) {
  if (!(options.tol > 0)) throw DomainError("tolerance must be positive");
  return solve_shift_invert(A, options.shift, options, true);
}

EigenResult lowest_eigenpairs(const DiscreteOperator& op, const SolverOptions& options) {
  EigenResult r = lowest_eigenpairs(op.matrix, options);
  r.h = op.h;
  return r;
}

EigenResult eigenpairs_near(const HermitianCsr& A, double sigma, int m, const SolverOptions& options) {
  SolverOptions o = options;
  o.m = m;
  o.inner = InnerSolver::kLdlt;
  return solve_shift_invert(A, sigma, o, false);
}

double cluster_median(const HermitianCsr& A, double lo, double hi, double resolution) {
  if (!(hi > lo)) throw DomainError("empty energy window");
  ShiftedFactorization f(A);
  const std::int64_t n_lo = inertia_at(f, lo);
  const std::int64_t n_hi = inertia_at(f, hi);
  if (n_hi <= n_lo) throw DomainError("no eigenvalues in the window");
  const std::int64_t target = n_lo + (n_hi - n_lo + 1) / 2;
  double a = lo, b = hi;
  while (b - a > resolution) {
    const double mid = 0.5 * (a + b);
    if (inertia_at(f, mid) >= target) b = mid;
    else a = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace magwell
