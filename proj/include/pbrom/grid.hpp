#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pbrom/errors.hpp"

namespace pbrom {

// Uniform cubic lattice of n^3 nodes spanning a box of edge length
// box_length centered at `center`; spacing h = box_length/(n-1).  Dirichlet
// data lives on the outermost node shell, the (n-2)^3 inner nodes are the
// unknowns.  Linear indices run x fastest, then y, then z.
struct GridSpec {
  std::size_t n = 0;
  double box_length = 0.0;
  std::array<double, 3> center{0.0, 0.0, 0.0};

  void validate() const {
    if (n < 3) throw assembly_error("grid needs at least 3 nodes per axis");
    if (!(box_length > 0.0) || !std::isfinite(box_length)) {
      throw assembly_error("grid box length must be positive and finite");
    }
  }

  double spacing() const { return box_length / static_cast<double>(n - 1); }
  double cell_volume() const {
    const double h = spacing();
    return h * h * h;
  }

  std::size_t num_nodes() const { return n * n * n; }
  std::size_t num_interior() const { return (n - 2) * (n - 2) * (n - 2); }
  std::size_t num_boundary() const { return num_nodes() - num_interior(); }

  double coord(std::size_t idx, int axis) const {
    return center[axis] - 0.5 * box_length +
           spacing() * static_cast<double>(idx);
  }
  std::array<double, 3> node_position(std::size_t i, std::size_t j,
                                      std::size_t k) const {
    return {coord(i, 0), coord(j, 1), coord(k, 2)};
  }

  bool is_boundary(std::size_t i, std::size_t j, std::size_t k) const {
    return i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 ||
           k == n - 1;
  }

  // Linear index into the interior unknown vector; valid for 1 <= i,j,k <= n-2.
  std::size_t interior_index(std::size_t i, std::size_t j, std::size_t k) const {
    const std::size_t m = n - 2;
    return ((k - 1) * m + (j - 1)) * m + (i - 1);
  }

  // Deterministic enumeration of the boundary shell (x fastest, then y, z);
  // defines the column order of the boundary coupling matrix.
  struct NodeRef {
    std::size_t i, j, k;
  };
  std::vector<NodeRef> boundary_nodes() const {
    std::vector<NodeRef> out;
    out.reserve(num_boundary());
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
          if (is_boundary(i, j, k)) out.push_back({i, j, k});
        }
      }
    }
    return out;
  }
};

}  // namespace pbrom
