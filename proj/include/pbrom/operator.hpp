#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "pbrom/boundary.hpp"
#include "pbrom/bspline.hpp"
#include "pbrom/coefficient_maps.hpp"
#include "pbrom/constants.hpp"
#include "pbrom/errors.hpp"
#include "pbrom/grid.hpp"

namespace pbrom {

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Finite-difference model with the Dirichlet shell eliminated, split so the
// ionic-strength dependence stays exactly affine:
//
//   A(mu) = A1 + mu * A2,      f(mu) = rho + B g(mu),
//
// A1: flux-form 7-point operator, entries (H/h^2) * eps_face, SPD.
// A2: diagonal H * kappa2_per_ionic_strength * ion_access (mu factored out).
// B ("coupling"): the eliminated boundary couplings, one column per boundary
//     node in the deterministic shell order; entries (H/h^2) * eps_face.
// rho: interior restriction of the spread-charge source.
struct ParametricOperator {
  GridSpec grid;
  double H = 0.0;
  SparseMat A1;
  Vector a2_diag;
  Vector rho;
  SparseMat coupling;
  std::vector<std::array<double, 3>> boundary_positions;

  std::size_t num_unknowns() const { return static_cast<std::size_t>(A1.rows()); }
  std::size_t num_boundary() const { return boundary_positions.size(); }

  // Boundary data vector g(mu) in shell order.
  Vector boundary_values(const BoundaryGenerator& bgen, double mu) const {
    Vector g(static_cast<Eigen::Index>(boundary_positions.size()));
    for (std::size_t b = 0; b < boundary_positions.size(); ++b) {
      g[static_cast<Eigen::Index>(b)] = bgen.value(boundary_positions[b], mu);
    }
    return g;
  }

  Vector rhs(const BoundaryGenerator& bgen, double mu) const {
    return rho + coupling * boundary_values(bgen, mu);
  }

  // A(mu) * x without materializing the sum.
  Vector apply(double mu, const Vector& x) const {
    return A1 * x + mu * a2_diag.cwiseProduct(x);
  }

  // Explicit A(mu); the diagonal pattern of A1 always contains the center
  // coefficient, so the sum preserves the sparsity structure.
  SparseMat materialize_matrix(double mu) const {
    SparseMat A = A1;
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
      A.coeffRef(r, r) += mu * a2_diag[r];
    }
    return A;
  }

  std::pair<SparseMat, Vector> materialize(double mu,
                                           const BoundaryGenerator& bgen) const {
    return {materialize_matrix(mu), rhs(bgen, mu)};
  }
};

// Assembles the affine pieces from the coefficient maps and the scaled
// source.  All coefficients carry the H = dx dy dz scaling of the flux form.
inline ParametricOperator assemble_operator(const GridSpec& g,
                                            const CoefficientMaps& maps,
                                            const SourceField& src,
                                            const PhysicalConstants& pc) {
  g.validate();
  const std::size_t n = g.n;
  if (maps.eps_x.nx() != n - 1 || maps.eps_x.ny() != n ||
      maps.eps_x.nz() != n || maps.eps_y.ny() != n - 1 ||
      maps.eps_z.nz() != n - 1 || maps.ion_access.nx() != n) {
    throw assembly_error("coefficient map dimensions do not match the grid");
  }
  if (src.rho.nx() != n || src.rho.ny() != n || src.rho.nz() != n) {
    throw assembly_error("source field dimensions do not match the grid");
  }

  ParametricOperator op;
  op.grid = g;
  op.H = g.cell_volume();
  const double h = g.spacing();
  const double w = op.H / (h * h);  // face coefficient scale
  const std::size_t m = n - 2;
  const std::size_t N = m * m * m;

  // Shell enumeration and full-grid -> boundary ordinal lookup.
  const auto shell = g.boundary_nodes();
  std::vector<int> bord(n * n * n, -1);
  op.boundary_positions.resize(shell.size());
  for (std::size_t b = 0; b < shell.size(); ++b) {
    const auto& nd = shell[b];
    bord[(nd.k * n + nd.j) * n + nd.i] = static_cast<int>(b);
    op.boundary_positions[b] = g.node_position(nd.i, nd.j, nd.k);
  }

  op.A1.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  op.A1.reserve(Eigen::VectorXi::Constant(static_cast<Eigen::Index>(N), 7));
  op.a2_diag.resize(static_cast<Eigen::Index>(N));
  op.rho.resize(static_cast<Eigen::Index>(N));

  std::vector<Eigen::Triplet<double>> coupling_entries;

  for (std::size_t k = 1; k + 1 < n; ++k) {
    for (std::size_t j = 1; j + 1 < n; ++j) {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const Eigen::Index row =
            static_cast<Eigen::Index>(g.interior_index(i, j, k));
        // Face dielectric samples around the node.
        const double ex_m = maps.eps_x(i - 1, j, k);
        const double ex_p = maps.eps_x(i, j, k);
        const double ey_m = maps.eps_y(i, j - 1, k);
        const double ey_p = maps.eps_y(i, j, k);
        const double ez_m = maps.eps_z(i, j, k - 1);
        const double ez_p = maps.eps_z(i, j, k);

        const double diag =
            w * (ex_m + ex_p + ey_m + ey_p + ez_m + ez_p);

        // Neighbours in ascending column order (z, y, x below; then center;
        // then x, y, z above) keep the row-major insertion cheap.
        struct Nb {
          std::size_t i, j, k;
          double eps;
        };
        const Nb nbs[6] = {{i, j, k - 1, ez_m}, {i, j - 1, k, ey_m},
                           {i - 1, j, k, ex_m}, {i + 1, j, k, ex_p},
                           {i, j + 1, k, ey_p}, {i, j, k + 1, ez_p}};

        for (int q = 0; q < 3; ++q) {
          const Nb& nb = nbs[q];
          if (!g.is_boundary(nb.i, nb.j, nb.k)) {
            op.A1.insert(row, static_cast<Eigen::Index>(
                                  g.interior_index(nb.i, nb.j, nb.k))) =
                -w * nb.eps;
          }
        }
        op.A1.insert(row, row) = diag;
        for (int q = 3; q < 6; ++q) {
          const Nb& nb = nbs[q];
          if (!g.is_boundary(nb.i, nb.j, nb.k)) {
            op.A1.insert(row, static_cast<Eigen::Index>(
                                  g.interior_index(nb.i, nb.j, nb.k))) =
                -w * nb.eps;
          }
        }
        // Eliminated boundary couplings move to the right-hand side with a
        // positive sign.
        for (const Nb& nb : nbs) {
          if (g.is_boundary(nb.i, nb.j, nb.k)) {
            const int col = bord[(nb.k * n + nb.j) * n + nb.i];
            coupling_entries.emplace_back(row, col, w * nb.eps);
          }
        }

        op.a2_diag[row] =
            op.H * pc.kappa2_per_ionic_strength * maps.ion_access(i, j, k);
        // src.rho already carries the full H*C*density scaling.
        op.rho[row] = src.rho(i, j, k);
      }
    }
  }
  op.A1.makeCompressed();
  op.coupling.resize(static_cast<Eigen::Index>(N),
                     static_cast<Eigen::Index>(shell.size()));
  op.coupling.setFromTriplets(coupling_entries.begin(), coupling_entries.end());
  op.coupling.makeCompressed();
  return op;
}

// Composes the full n^3 nodal field from interior unknowns and boundary data.
inline Array3 compose_full_field(const GridSpec& g, const Vector& interior,
                                 const Vector& boundary) {
  const std::size_t n = g.n;
  if (interior.size() != static_cast<Eigen::Index>(g.num_interior()) ||
      boundary.size() != static_cast<Eigen::Index>(g.num_boundary())) {
    throw assembly_error("interior/boundary sizes do not match the grid");
  }
  Array3 out(n, n, n, 0.0);
  std::size_t b = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        if (g.is_boundary(i, j, k)) {
          out(i, j, k) = boundary[static_cast<Eigen::Index>(b++)];
        } else {
          out(i, j, k) =
              interior[static_cast<Eigen::Index>(g.interior_index(i, j, k))];
        }
      }
    }
  }
  if (b != g.num_boundary()) throw assembly_error("boundary size mismatch");
  return out;
}

}  // namespace pbrom
