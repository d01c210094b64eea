#pragma once

#include <Eigen/Sparse>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "pbrom/errors.hpp"
#include "pbrom/operator.hpp"

namespace pbrom {

enum class PreconKind { jacobi, ssor };

struct SolveReport {
  long iterations = 0;
  double final_relative_residual = 0.0;  // re-verified ||f - A u|| / ||f||
  double wall_time = 0.0;                // seconds
  bool converged = false;
  // sqrt(r' M^-1 r) per iteration, for convergence diagnostics.
  std::vector<double> precon_residual_history;
};

// Non-convergence carries the best iterate so callers can salvage it.
struct divergence_error : solver_error {
  divergence_error(const std::string& msg, Vector best_iterate,
                   SolveReport rep)
      : solver_error(msg), best(std::move(best_iterate)), report(std::move(rep)) {}
  Vector best;
  SolveReport report;
};

struct matrix_property_error : solver_error {
  explicit matrix_property_error(const std::string& msg) : solver_error(msg) {}
};

namespace detail {

class Preconditioner {
 public:
  Preconditioner(const SparseMat& A, PreconKind kind) : A_(A), kind_(kind) {
    diag_ = A.diagonal();
    for (Eigen::Index i = 0; i < diag_.size(); ++i) {
      if (!(diag_[i] > 0.0)) {
        throw matrix_property_error(
            "non-positive diagonal entry; matrix is not SPD");
      }
    }
  }

  // Symmetric Gauss--Seidel: M = (D+L) D^-1 (D+U); Jacobi: M = D.
  Vector apply(const Vector& r) const {
    if (kind_ == PreconKind::jacobi) return r.cwiseQuotient(diag_);
    Vector y = A_.triangularView<Eigen::Lower>().solve(r);
    y.array() *= diag_.array();
    return A_.triangularView<Eigen::Upper>().solve(y);
  }

 private:
  const SparseMat& A_;
  PreconKind kind_;
  Vector diag_;
};

}  // namespace detail

struct PcgOptions {
  double tol = 1e-10;
  long max_iter = 0;  // 0: use the 10 * N^(1/3) default
  PreconKind precon = PreconKind::ssor;
};

// Conjugate gradients with zero initial guess.  The recurrence residual is
// never trusted on its own: a convergence claim is re-verified with an
// explicit matrix-vector product, and the iteration restarts from the true
// residual if the recurrence has drifted.
inline Vector solve_spd(const SparseMat& A, const Vector& f,
                        const PcgOptions& opt, SolveReport& rep) {
  if (A.rows() != A.cols() || A.rows() != f.size()) {
    throw solver_error("solve_spd: dimension mismatch");
  }
  if (!(opt.tol > 0.0)) throw solver_error("solve_spd: tolerance must be > 0");
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  rep = SolveReport{};
  const Eigen::Index N = A.rows();
  long max_iter = opt.max_iter;
  if (max_iter <= 0) {
    max_iter = std::max<long>(
        10, 10 * static_cast<long>(std::llround(std::cbrt(double(N)))));
  }

  Vector x = Vector::Zero(N);
  const double fnorm = f.norm();
  if (fnorm == 0.0) {
    rep.converged = true;
    rep.wall_time = elapsed();
    return x;
  }

  detail::Preconditioner M(A, opt.precon);
  Vector r = f;
  Vector z = M.apply(r);
  Vector p = z;
  double rz = r.dot(z);
  rep.precon_residual_history.push_back(std::sqrt(std::max(rz, 0.0)));

  for (long it = 0; it < max_iter; ++it) {
    const Vector q = A * p;
    const double pq = p.dot(q);
    if (!(pq > 0.0)) {
      throw matrix_property_error(
          "negative curvature encountered; matrix is not SPD");
    }
    const double alpha = rz / pq;
    x += alpha * p;
    r -= alpha * q;
    rep.iterations = it + 1;

    if (r.norm() <= opt.tol * fnorm) {
      // Verify against the exact residual before declaring success.
      Vector rtrue = f - A * x;
      const double rel = rtrue.norm() / fnorm;
      if (rel <= opt.tol) {
        rep.converged = true;
        rep.final_relative_residual = rel;
        rep.wall_time = elapsed();
        return x;
      }
      r = std::move(rtrue);  // restart the recurrence from the truth
      z = M.apply(r);
      p = z;
      rz = r.dot(z);
      rep.precon_residual_history.push_back(std::sqrt(std::max(rz, 0.0)));
      continue;
    }

    z = M.apply(r);
    const double rz_next = r.dot(z);
    const double beta = rz_next / rz;
    rz = rz_next;
    p = z + beta * p;
    rep.precon_residual_history.push_back(std::sqrt(std::max(rz, 0.0)));
  }

  rep.final_relative_residual = (f - A * x).norm() / fnorm;
  rep.wall_time = elapsed();
  throw divergence_error("PCG did not reach tol " + std::to_string(opt.tol) +
                             " within " + std::to_string(max_iter) +
                             " iterations (relative residual " +
                             std::to_string(rep.final_relative_residual) + ")",
                         x, rep);
}

// Convenience wrapper: materialized solve of A(mu) u = f(mu).
inline Vector solve_fom(const ParametricOperator& op,
                        const BoundaryGenerator& bgen, double mu,
                        const PcgOptions& opt, SolveReport& rep) {
  auto [A, f] = op.materialize(mu, bgen);
  return solve_spd(A, f, opt, rep);
}

}  // namespace pbrom
