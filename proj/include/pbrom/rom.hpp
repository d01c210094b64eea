#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "pbrom/deim.hpp"
#include "pbrom/errors.hpp"
#include "pbrom/operator.hpp"
#include "pbrom/pcg.hpp"

namespace pbrom {

// Parameter domain samples for the offline stage.
struct TrainingSet {
  std::vector<double> samples;
  double lo = 0.0, hi = 0.0;

  void validate() const {
    if (samples.empty()) throw assembly_error("empty training set");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i] < lo || samples[i] > hi) {
        throw assembly_error("training sample outside the parameter domain");
      }
      for (std::size_t j = i + 1; j < samples.size(); ++j) {
        if (samples[i] == samples[j]) {
          throw assembly_error("duplicate training sample");
        }
      }
    }
  }
};

// Uniformly spaced samples across [lo, hi], endpoints included.
inline TrainingSet make_training_set(double lo, double hi, std::size_t count) {
  if (count == 0) throw assembly_error("training set needs >= 1 sample");
  if (!(hi >= lo)) throw assembly_error("invalid parameter domain");
  TrainingSet t;
  t.lo = lo;
  t.hi = hi;
  if (count == 1) {
    t.samples.push_back(lo);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      t.samples.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                   static_cast<double>(count - 1));
    }
  }
  t.validate();
  return t;
}

struct ReducedBasis {
  Matrix V;  // orthonormal columns
  std::vector<double> selected_mus;

  Eigen::Index size() const { return V.cols(); }
};

// Modified Gram--Schmidt append with one re-orthogonalization pass.  Returns
// false (basis unchanged) when the snapshot deflates below 1e-10 of its norm,
// i.e. it adds nothing beyond round-off to the span.
inline bool orthonormalize_append(ReducedBasis& basis, const Vector& snapshot) {
  const double norm0 = snapshot.norm();
  if (!(norm0 > 0.0)) throw assembly_error("degenerate zero snapshot");
  Vector v = snapshot;
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index c = 0; c < basis.V.cols(); ++c) {
      v -= basis.V.col(c).dot(v) * basis.V.col(c);
    }
  }
  const double norm1 = v.norm();
  if (norm1 < 1e-10 * norm0) return false;
  basis.V.conservativeResize(snapshot.size(), basis.V.cols() + 1);
  basis.V.col(basis.V.cols() - 1) = v / norm1;
  return true;
}

// mu-independent projected quantities; together with the DEIM closure sums
// these are all an online solve needs.
struct ReducedModel {
  Matrix A1h, A2h;
  Vector rhoh;
  Matrix deim_block;  // V^T U_F (P^T U_F)^-1
  double d_lo = 0.0, d_hi = 0.0;
  std::vector<double> selected_mus;

  Eigen::Index dim() const { return A1h.rows(); }
  bool in_domain(double mu) const { return mu >= d_lo && mu <= d_hi; }
};

inline ReducedModel project(const ParametricOperator& op,
                            const ReducedBasis& basis, const DeimModel& deim) {
  ReducedModel rm;
  const Matrix& V = basis.V;
  if (V.rows() != static_cast<Eigen::Index>(op.num_unknowns())) {
    throw assembly_error("basis/operator dimension mismatch");
  }
  rm.A1h = V.transpose() * (op.A1 * V).eval();
  rm.A2h = V.transpose() * op.a2_diag.asDiagonal() * V;
  // Symmetrize away the round-off of the congruence products.
  rm.A1h = 0.5 * (rm.A1h + rm.A1h.transpose()).eval();
  rm.A2h = 0.5 * (rm.A2h + rm.A2h.transpose()).eval();
  rm.rhoh = V.transpose() * op.rho;
  const Matrix vtu = V.transpose() * deim.basis().leftCols(deim.r());
  rm.deim_block = deim.solve_from_right(vtu);
  rm.selected_mus = basis.selected_mus;
  return rm;
}

// Dense reduced solve; cost depends on N and r only.
inline Vector rom_solve(const ReducedModel& rm, const DeimModel& deim,
                        const BoundaryGenerator& bgen, double mu) {
  const Matrix An = rm.A1h + mu * rm.A2h;
  const Vector b_samp = deim.eval_main(bgen, mu);
  const Vector fn = rm.rhoh + rm.deim_block * b_samp;
  Eigen::LDLT<Matrix> ldlt(An);
  if (ldlt.info() != Eigen::Success) {
    throw solver_error("reduced system is not positive definite");
  }
  Vector u = ldlt.solve(fn);
  if (!u.allFinite()) throw solver_error("reduced solve produced non-finite values");
  return u;
}

struct ErrorEstimate {
  double delta = 0.0;      // || r_N^DEIM + e_DEIM ||_2
  double delta_rig = std::numeric_limits<double>::quiet_NaN();
};

// Residual-based estimate with the DEIM-interpolated boundary term and the
// oblique-projector correction for the interpolation error.  The lifted
// products are N-dimensional work and priced as offline/training cost.
inline ErrorEstimate estimate_error(const ParametricOperator& op,
                                    const ReducedModel& rm,
                                    const ReducedBasis& basis,
                                    const Vector& u_N,
                                    const BoundaryGenerator& bgen, double mu,
                                    const DeimModel& deim) {
  const Vector c = deim.coefficients(deim.eval_main(bgen, mu));
  const Vector b_tilde = deim.reconstruct(c);
  const Vector lifted = basis.V * u_N;
  const Vector r = op.rho + b_tilde - op.apply(mu, lifted);
  const Vector e = deim.has_extension()
                       ? deim.error_estimate(deim.eval_extension(bgen, mu), c)
                       : Vector::Zero(r.size());
  ErrorEstimate est;
  est.delta = (r + e).norm();
  return est;
}

struct GreedyHistoryRow {
  int iteration = 0;      // basis size after this iteration
  double mu_star = 0.0;   // sample whose snapshot was added
  double delta_max = 0.0; // max estimator over the training set
  double true_err_max = std::numeric_limits<double>::quiet_NaN();
};

struct GreedyOptions {
  double eps_tol = 1e-3;
  Eigen::Index max_N = 10;
  PcgOptions fom;
  bool track_true_error = false;  // test mode: FOM oracle at every sample
};

struct GreedyResult {
  ReducedBasis basis;
  ReducedModel model;
  std::vector<GreedyHistoryRow> history;
  bool converged = false;   // max estimator fell below eps_tol
  bool deflated = false;    // a selected snapshot added nothing new
};

// Weak greedy sampling of the parameter domain: start from the first training
// sample, then repeatedly enrich at the sample with the largest error
// estimate until the estimate falls below eps_tol or the basis reaches max_N.
inline GreedyResult greedy_build(const ParametricOperator& op,
                                 const BoundaryGenerator& bgen,
                                 const TrainingSet& train,
                                 const DeimModel& deim,
                                 const GreedyOptions& opt) {
  train.validate();
  if (!(opt.eps_tol > 0.0)) throw assembly_error("eps_tol must be > 0");
  GreedyResult res;

  std::vector<Vector> fom_cache;
  if (opt.track_true_error) {
    fom_cache.resize(train.samples.size());
    for (std::size_t s = 0; s < train.samples.size(); ++s) {
      SolveReport rep;
      fom_cache[s] = solve_fom(op, bgen, train.samples[s], opt.fom, rep);
    }
  }

  std::size_t next = 0;  // index of the sample to snapshot
  while (true) {
    const double mu_star = train.samples[next];
    Vector u;
    if (opt.track_true_error) {
      u = fom_cache[next];
    } else {
      SolveReport rep;
      u = solve_fom(op, bgen, mu_star, opt.fom, rep);
    }
    if (!orthonormalize_append(res.basis, u)) {
      if (res.basis.size() == 0) {
        throw assembly_error("initial snapshot deflated to zero");
      }
      res.deflated = true;
      break;  // the estimator can no longer be reduced by this sample
    }
    res.basis.selected_mus.push_back(mu_star);
    res.model = project(op, res.basis, deim);

    GreedyHistoryRow row;
    row.iteration = static_cast<int>(res.basis.size());
    row.mu_star = mu_star;
    double delta_max = -1.0;
    double true_max = -1.0;
    std::size_t arg = 0;
    for (std::size_t s = 0; s < train.samples.size(); ++s) {
      const double mu = train.samples[s];
      const Vector uN = rom_solve(res.model, deim, bgen, mu);
      const double delta =
          estimate_error(op, res.model, res.basis, uN, bgen, mu, deim).delta;
      if (delta > delta_max) {
        delta_max = delta;
        arg = s;
      }
      if (opt.track_true_error) {
        true_max = std::max(true_max,
                            (fom_cache[s] - res.basis.V * uN).norm());
      }
    }
    row.delta_max = delta_max;
    if (opt.track_true_error) row.true_err_max = true_max;
    res.history.push_back(row);

    if (delta_max < opt.eps_tol) {
      res.converged = true;
      break;
    }
    if (res.basis.size() >= opt.max_N) break;
    next = arg;
  }
  res.model.d_lo = train.lo;
  res.model.d_hi = train.hi;
  return res;
}

}  // namespace pbrom
