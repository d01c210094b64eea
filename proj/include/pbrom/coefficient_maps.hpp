#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "pbrom/array3.hpp"
#include "pbrom/errors.hpp"
#include "pbrom/grid.hpp"
#include "pbrom/molecule.hpp"
#include "pbrom/surface.hpp"

namespace pbrom {

// How the dielectric is evaluated on a face between two neighbouring nodes.
//  midpoint: point sample of eps at the half-shifted node (fast, default).
//  harmonic: inverse of the edge-averaged 1/eps, a finite-volume style
//            closure that tracks curved interfaces noticeably better at
//            coarse spacing; quadrature is a fixed composite midpoint rule.
enum class FaceSampling { midpoint, harmonic };

// Staggered dielectric samples plus the nodal ion-accessibility factor.
// eps_x(i,j,k) lives between nodes (i,j,k) and (i+1,j,k), likewise y/z.
// ion_access is the solvent characteristic with Stern-inflated radii and is
// stored without any ionic-strength factor, so the screening term scales
// exactly linearly in the ionic strength.
struct CoefficientMaps {
  Array3 eps_x, eps_y, eps_z;
  Array3 ion_access;
  double eps_in = 0.0;
  double eps_out = 0.0;
};

namespace detail {

inline double eps_of_chi(double chi, double eps_in, double eps_out) {
  return eps_in + (eps_out - eps_in) * chi;
}

inline double face_eps(const MoleculeModel& m, const GridSpec& g,
                       std::size_t i, std::size_t j, std::size_t k, int axis,
                       double eps_in, double eps_out, double window,
                       FaceSampling mode) {
  const std::array<double, 3> a = g.node_position(i, j, k);
  std::array<double, 3> b = a;
  b[axis] += g.spacing();
  if (mode == FaceSampling::midpoint) {
    const std::array<double, 3> mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]),
                                    0.5 * (a[2] + b[2])};
    return eps_of_chi(solvent_characteristic(m, mid, 0.0, window), eps_in,
                      eps_out);
  }
  // Harmonic closure: eps_face = 1 / <1/eps> along the edge.
  constexpr int kQuad = 16;
  double acc = 0.0;
  for (int q = 0; q < kQuad; ++q) {
    const double s = (q + 0.5) / kQuad;
    std::array<double, 3> p;
    for (int d = 0; d < 3; ++d) p[d] = a[d] + s * (b[d] - a[d]);
    acc += 1.0 / eps_of_chi(solvent_characteristic(m, p, 0.0, window), eps_in,
                            eps_out);
  }
  return kQuad / acc;
}

}  // namespace detail

// Builds the three staggered dielectric arrays.  Dimensions: eps_x is
// (n-1) x n x n, eps_y is n x (n-1) x n, eps_z is n x n x (n-1).
inline void build_dielectric_maps(const MoleculeModel& m, const GridSpec& g,
                                  double eps_in, double eps_out, double window,
                                  Array3& eps_x, Array3& eps_y, Array3& eps_z,
                                  FaceSampling mode = FaceSampling::midpoint) {
  g.validate();
  if (!(eps_in > 0.0) || !(eps_out > 0.0) || !std::isfinite(eps_in) ||
      !std::isfinite(eps_out)) {
    throw assembly_error("dielectric constants must be positive and finite");
  }
  const std::size_t n = g.n;
  eps_x = Array3(n - 1, n, n);
  eps_y = Array3(n, n - 1, n);
  eps_z = Array3(n, n, n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i + 1 < n; ++i) {
        eps_x(i, j, k) =
            detail::face_eps(m, g, i, j, k, 0, eps_in, eps_out, window, mode);
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j + 1 < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        eps_y(i, j, k) =
            detail::face_eps(m, g, i, j, k, 1, eps_in, eps_out, window, mode);
      }
    }
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        eps_z(i, j, k) =
            detail::face_eps(m, g, i, j, k, 2, eps_in, eps_out, window, mode);
      }
    }
  }
}

// Nodal ion accessibility: solvent characteristic evaluated with radii
// inflated by the Stern offset.  0 inside the molecule and its ion-exclusion
// shell, 1 in bulk electrolyte, smooth in between.
inline Array3 build_ion_access_map(const MoleculeModel& m, const GridSpec& g,
                                   double stern_radius, double window) {
  g.validate();
  if (stern_radius < 0.0) {
    throw assembly_error("Stern offset must be non-negative");
  }
  const std::size_t n = g.n;
  Array3 access(n, n, n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        access(i, j, k) = solvent_characteristic(m, g.node_position(i, j, k),
                                                 stern_radius, window);
      }
    }
  }
  return access;
}

inline CoefficientMaps build_coefficient_maps(
    const MoleculeModel& m, const GridSpec& g, double eps_in, double eps_out,
    double window, double stern_radius,
    FaceSampling mode = FaceSampling::midpoint) {
  CoefficientMaps maps;
  maps.eps_in = eps_in;
  maps.eps_out = eps_out;
  build_dielectric_maps(m, g, eps_in, eps_out, window, maps.eps_x, maps.eps_y,
                        maps.eps_z, mode);
  maps.ion_access = build_ion_access_map(m, g, stern_radius, window);
  return maps;
}

// Reference state for solvation differences: uniform dielectric, no ions.
inline CoefficientMaps build_homogeneous_maps(const GridSpec& g, double eps) {
  g.validate();
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw assembly_error("dielectric constant must be positive and finite");
  }
  const std::size_t n = g.n;
  CoefficientMaps maps;
  maps.eps_in = eps;
  maps.eps_out = eps;
  maps.eps_x = Array3(n - 1, n, n, eps);
  maps.eps_y = Array3(n, n - 1, n, eps);
  maps.eps_z = Array3(n, n, n - 1, eps);
  maps.ion_access = Array3(n, n, n, 0.0);
  return maps;
}

}  // namespace pbrom
