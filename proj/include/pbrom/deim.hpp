#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pbrom/boundary.hpp"
#include "pbrom/errors.hpp"
#include "pbrom/operator.hpp"

namespace pbrom {

using Matrix = Eigen::MatrixXd;

// Training snapshots of the boundary contribution b(mu) = B g(mu).
struct SnapshotMatrixF {
  Matrix F;                 // one column per training sample
  std::vector<double> mus;  // the samples, in training order
};

inline SnapshotMatrixF build_snapshots_b(const ParametricOperator& op,
                                         const BoundaryGenerator& bgen,
                                         const std::vector<double>& train) {
  if (train.empty()) throw assembly_error("empty training set");
  SnapshotMatrixF snap;
  snap.mus = train;
  snap.F.resize(static_cast<Eigen::Index>(op.num_unknowns()),
                static_cast<Eigen::Index>(train.size()));
  for (std::size_t c = 0; c < train.size(); ++c) {
    snap.F.col(static_cast<Eigen::Index>(c)) =
        op.coupling * op.boundary_values(bgen, train[c]);
  }
  return snap;
}

// Thin POD of the snapshot matrix.  U keeps every direction above the
// machine-noise plateau (sigma_i >= 1e-14 * sigma_1); r marks the cut chosen
// by the relative tail-sum criterion sum_{i>r} sigma_i / sum_i sigma_i <
// eps_svd, evaluated over the retained values.
struct PodBasis {
  Matrix U;               // N x k, orthonormal columns, k = retained count
  Eigen::VectorXd sigma;  // all min(N, l) singular values, descending
  Eigen::Index r = 0;
};

inline PodBasis pod_truncate(const Matrix& F, double eps_svd) {
  if (!(eps_svd > 0.0 && eps_svd < 1.0)) {
    throw assembly_error("eps_svd must lie in (0, 1)");
  }
  Eigen::BDCSVD<Matrix> svd(F, Eigen::ComputeThinU);
  PodBasis pod;
  pod.sigma = svd.singularValues();
  const double s1 = pod.sigma.size() ? pod.sigma[0] : 0.0;
  if (!(s1 > 0.0)) throw assembly_error("snapshot matrix is identically zero");

  Eigen::Index keep = 0;
  while (keep < pod.sigma.size() && pod.sigma[keep] >= 1e-14 * s1) ++keep;
  pod.U = svd.matrixU().leftCols(keep);

  // Defensive orthonormality re-check of the retained basis.
  const double ortho =
      (pod.U.transpose() * pod.U - Matrix::Identity(keep, keep))
          .cwiseAbs()
          .maxCoeff();
  if (ortho > 1e-10) {
    throw assembly_error("POD basis lost orthonormality (defect " +
                         std::to_string(ortho) + ")");
  }

  const double total = pod.sigma.head(keep).sum();
  pod.r = keep;
  for (Eigen::Index r = 1; r <= keep; ++r) {
    const double tail = pod.sigma.segment(r, keep - r).sum();
    if (tail / total < eps_svd) {
      pod.r = r;
      break;
    }
  }
  return pod;
}

// Greedy interpolation-index selection: the first index maximizes |u_1|; each
// later index maximizes the magnitude of the residual of u_i interpolated on
// the indices selected so far.  Ties break to the lowest index.
inline std::vector<Eigen::Index> select_interpolation_indices(const Matrix& U) {
  const Eigen::Index count = U.cols();
  if (count == 0) throw assembly_error("empty basis for index selection");
  std::vector<Eigen::Index> idx;
  idx.reserve(static_cast<std::size_t>(count));

  auto argmax_abs = [](const Vector& v) {
    Eigen::Index best = 0;
    double bv = std::fabs(v[0]);
    for (Eigen::Index i = 1; i < v.size(); ++i) {
      const double a = std::fabs(v[i]);
      if (a > bv) {
        bv = a;
        best = i;
      }
    }
    return best;
  };

  idx.push_back(argmax_abs(U.col(0)));
  for (Eigen::Index i = 1; i < count; ++i) {
    const Eigen::Index m = i;  // current basis size
    Matrix PU(m, m);
    Vector Pu(m);
    for (Eigen::Index q = 0; q < m; ++q) {
      PU.row(q) = U.row(idx[static_cast<std::size_t>(q)]).head(m);
      Pu[q] = U(idx[static_cast<std::size_t>(q)], i);
    }
    Eigen::FullPivLU<Matrix> lu(PU);
    if (!lu.isInvertible()) {
      throw assembly_error(
          "interpolation matrix became singular during index selection");
    }
    const Vector alpha = lu.solve(Pu);
    Vector res = U.col(i) - U.leftCols(m) * alpha;
    const Eigen::Index pick = argmax_abs(res);
    for (Eigen::Index prev : idx) {
      if (prev == pick) {
        throw assembly_error("duplicate interpolation index selected");
      }
    }
    idx.push_back(pick);
  }
  return idx;
}

// Deserialized pieces of a DeimModel (see io.hpp).  U may be empty when the
// container was saved without the lifted basis; the model then supports the
// sampled-entry evaluations but not reconstruction or error estimation.
struct DeimParts {
  Matrix U;  // N x rstar, or empty when saved without lift
  Eigen::VectorXd sigma;
  Eigen::Index r = 0;
  Eigen::Index rstar = 0;
  std::vector<Eigen::Index> indices;
  std::vector<std::vector<std::array<double, 3>>> sample_nodes;
  std::vector<std::vector<double>> sample_coeffs;
};

// Interpolation model for b(mu) plus the oblique-projector error estimate.
// The first r indices/basis vectors form the working approximation; the
// extension (r..rstar) only feeds the estimate.  Each sampled row of b maps
// back through the boundary-coupling matrix to the few boundary nodes that
// feed it, so an online evaluation touches rstar closure sums, never all of b.
class DeimModel {
 public:
  DeimModel() = default;

  // pod: truncated POD of the b snapshots; op: the assembled model whose
  // coupling matrix defines the sampled-entry closure sums.
  DeimModel(const PodBasis& pod, const ParametricOperator& op,
            Eigen::Index extension = 2) {
    U_ = pod.U;
    sigma_ = pod.sigma;
    r_ = pod.r;
    rstar_ = std::min<Eigen::Index>(r_ + extension, U_.cols());
    indices_ = select_interpolation_indices(U_.leftCols(rstar_));

    Matrix PU(r_, r_);
    for (Eigen::Index q = 0; q < r_; ++q) {
      PU.row(q) = U_.row(indices_[static_cast<std::size_t>(q)]).head(r_);
    }
    interp_lu_.compute(PU);
    if (!interp_lu_.isInvertible()) {
      throw assembly_error("P^T U_F is singular");
    }

    if (rstar_ > r_) {
      const Eigen::Index e = rstar_ - r_;
      Matrix Uf_ext_rows(e, r_);   // U_F rows at the extension indices
      Matrix Ue_ext_rows(e, e);    // extension-basis rows at those indices
      Matrix Ue_main_rows(r_, e);  // extension-basis rows at the main indices
      for (Eigen::Index q = 0; q < e; ++q) {
        const Eigen::Index row = indices_[static_cast<std::size_t>(r_ + q)];
        Uf_ext_rows.row(q) = U_.row(row).head(r_);
        Ue_ext_rows.row(q) = U_.row(row).segment(r_, e);
      }
      for (Eigen::Index q = 0; q < r_; ++q) {
        Ue_main_rows.row(q) =
            U_.row(indices_[static_cast<std::size_t>(q)]).segment(r_, e);
      }
      uf_ext_rows_ = Uf_ext_rows;
      w_block_ = interp_lu_.solve(Ue_main_rows);  // (P^T U_F)^-1 P^T U_ext
      ext_lu_.compute(Ue_ext_rows - Uf_ext_rows * w_block_);
      if (!ext_lu_.isInvertible()) {
        throw assembly_error("estimator extension matrix is singular");
      }
    }

    // Sampled-entry closure metadata from the coupling matrix.
    sample_nodes_.resize(indices_.size());
    sample_coeffs_.resize(indices_.size());
    for (std::size_t q = 0; q < indices_.size(); ++q) {
      const Eigen::Index row = indices_[q];
      for (SparseMat::InnerIterator it(op.coupling, row); it; ++it) {
        sample_nodes_[q].push_back(
            op.boundary_positions[static_cast<std::size_t>(it.col())]);
        sample_coeffs_[q].push_back(it.value());
      }
    }
  }

  // Rebuild from deserialized pieces.  All factorizations are recomputed from
  // the stored basis when it is present.
  explicit DeimModel(DeimParts parts)
      : U_(std::move(parts.U)),
        sigma_(std::move(parts.sigma)),
        r_(parts.r),
        rstar_(parts.rstar),
        indices_(std::move(parts.indices)),
        sample_nodes_(std::move(parts.sample_nodes)),
        sample_coeffs_(std::move(parts.sample_coeffs)) {
    if (indices_.size() != static_cast<std::size_t>(rstar_) ||
        sample_nodes_.size() != indices_.size() ||
        sample_coeffs_.size() != indices_.size() || r_ < 0 || rstar_ < r_) {
      throw assembly_error("inconsistent deserialized interpolation model");
    }
    has_lift_ = U_.size() > 0;
    if (!has_lift_) return;
    if (U_.cols() != rstar_) {
      throw assembly_error("stored basis width does not match index count");
    }
    Matrix PU(r_, r_);
    for (Eigen::Index q = 0; q < r_; ++q) {
      PU.row(q) = U_.row(indices_[static_cast<std::size_t>(q)]).head(r_);
    }
    interp_lu_.compute(PU);
    if (!interp_lu_.isInvertible()) {
      throw assembly_error("P^T U_F is singular");
    }
    if (rstar_ > r_) {
      const Eigen::Index e = rstar_ - r_;
      Matrix Uf_ext_rows(e, r_);
      Matrix Ue_ext_rows(e, e);
      Matrix Ue_main_rows(r_, e);
      for (Eigen::Index q = 0; q < e; ++q) {
        const Eigen::Index row = indices_[static_cast<std::size_t>(r_ + q)];
        Uf_ext_rows.row(q) = U_.row(row).head(r_);
        Ue_ext_rows.row(q) = U_.row(row).segment(r_, e);
      }
      for (Eigen::Index q = 0; q < r_; ++q) {
        Ue_main_rows.row(q) =
            U_.row(indices_[static_cast<std::size_t>(q)]).segment(r_, e);
      }
      uf_ext_rows_ = Uf_ext_rows;
      w_block_ = interp_lu_.solve(Ue_main_rows);
      ext_lu_.compute(Ue_ext_rows - Uf_ext_rows * w_block_);
      if (!ext_lu_.isInvertible()) {
        throw assembly_error("estimator extension matrix is singular");
      }
    }
  }

  Eigen::Index r() const { return r_; }
  Eigen::Index rstar() const { return rstar_; }
  bool has_lift() const { return has_lift_; }
  const Matrix& basis() const { return U_; }
  auto U_F() const { return U_.leftCols(r_); }
  const Eigen::VectorXd& singular_values() const { return sigma_; }
  const std::vector<Eigen::Index>& indices() const { return indices_; }

  // Entries of b(mu) at the main (offset 0, count r) or extension (offset r,
  // count rstar - r) indices, via the per-row closure sums.  Bumps the entry
  // counter so tests can pin the online evaluation cost.
  Vector eval_sampled(const BoundaryGenerator& bgen, double mu,
                      Eigen::Index offset, Eigen::Index count) const {
    Vector out = Vector::Zero(count);
    for (Eigen::Index q = 0; q < count; ++q) {
      const std::size_t s = static_cast<std::size_t>(offset + q);
      double acc = 0.0;
      for (std::size_t t = 0; t < sample_nodes_[s].size(); ++t) {
        acc += sample_coeffs_[s][t] * bgen.value(sample_nodes_[s][t], mu);
      }
      out[q] = acc;
    }
    entry_eval_count_ += count;
    return out;
  }
  Vector eval_main(const BoundaryGenerator& bgen, double mu) const {
    return eval_sampled(bgen, mu, 0, r_);
  }
  Vector eval_extension(const BoundaryGenerator& bgen, double mu) const {
    return eval_sampled(bgen, mu, r_, rstar_ - r_);
  }

  long entry_eval_count() const { return entry_eval_count_; }
  void reset_entry_eval_count() const { entry_eval_count_ = 0; }

  // c(mu) from the sampled entries; the reconstruction U_F c matches b at
  // the interpolation indices by construction.
  Vector coefficients(const Vector& b_sampled) const {
    require_lift();
    return interp_lu_.solve(b_sampled);
  }

  // M * (P^T U_F)^-1, used when precomputing projected online blocks.
  Matrix solve_from_right(const Matrix& M) const {
    require_lift();
    const Matrix t = interp_lu_.transpose().solve(M.transpose());
    return t.transpose();
  }

  Vector reconstruct(const Vector& c) const {
    require_lift();
    return U_F() * c;
  }

  bool has_extension() const { return rstar_ > r_; }

  // Oblique-projector estimate of the interpolation error b - U_F c, driven
  // by the extension samples only.  Returns the zero vector when no
  // extension direction is available.
  Vector error_estimate(const Vector& b_sampled_ext, const Vector& c) const {
    require_lift();
    const Eigen::Index N = U_.rows();
    if (!has_extension()) return Vector::Zero(N);
    const Eigen::Index e = rstar_ - r_;
    const Vector y = b_sampled_ext - uf_ext_rows_ * c;
    const Vector z = ext_lu_.solve(y);
    return U_.middleCols(r_, e) * z - U_F() * (w_block_ * z);
  }

  // Access for persistence.
  const Matrix& uf_ext_rows() const { return uf_ext_rows_; }
  const Matrix& w_block() const { return w_block_; }
  const std::vector<std::vector<std::array<double, 3>>>& sample_nodes() const {
    return sample_nodes_;
  }
  const std::vector<std::vector<double>>& sample_coeffs() const {
    return sample_coeffs_;
  }

 private:
  void require_lift() const {
    if (!has_lift_) {
      throw assembly_error(
          "operation needs the lifted basis, which this model was loaded "
          "without");
    }
  }

  Matrix U_;
  Eigen::VectorXd sigma_;
  Eigen::Index r_ = 0, rstar_ = 0;
  std::vector<Eigen::Index> indices_;
  Eigen::FullPivLU<Matrix> interp_lu_;
  Matrix uf_ext_rows_;  // U_F rows at extension indices
  Matrix w_block_;      // (P^T U_F)^-1 (extension rows at main indices)
  Eigen::FullPivLU<Matrix> ext_lu_;
  std::vector<std::vector<std::array<double, 3>>> sample_nodes_;
  std::vector<std::vector<double>> sample_coeffs_;
  mutable long entry_eval_count_ = 0;
  bool has_lift_ = true;
};

// Free-function spellings used by callers that follow the operation names.
inline Vector deim_apply(const DeimModel& model, const Vector& b_sampled) {
  return model.coefficients(b_sampled);
}
inline Vector deim_error_estimate(const DeimModel& model,
                                  const Vector& b_sampled_ext,
                                  const Vector& c) {
  return model.error_estimate(b_sampled_ext, c);
}

}  // namespace pbrom
