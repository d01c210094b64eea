#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "pbrom/errors.hpp"
#include "pbrom/molecule.hpp"

namespace pbrom {

// Smoothed characteristic of the solvent side of a sphere of radius `radius`:
// 0 for d <= radius - window, 1 for d >= radius + window, and in between the
// unique cubic in d that matches value and slope at both ends,
//   s(xi) = 3 xi^2 - 2 xi^3,   xi = (d - radius + window) / (2 window).
// Monotone and C^1 in d for any window > 0.
inline double spline_surface_value(double d, double radius, double window) {
  if (!(window > 0.0)) throw assembly_error("surface window must be > 0");
  if (d <= radius - window) return 0.0;
  if (d >= radius + window) return 1.0;
  const double xi = (d - radius + window) / (2.0 * window);
  return xi * xi * (3.0 - 2.0 * xi);
}

// Characteristic of the ion-accessible/solvent region around a molecule:
// min over atoms of the per-sphere value with radii inflated by `inflate`
// (0 for the dielectric cavity, the Stern-layer offset for ion exclusion).
// Inside any atom sphere it is 0, in bulk solvent 1.  No atoms means pure
// solvent everywhere.
inline double solvent_characteristic(const MoleculeModel& m,
                                     const std::array<double, 3>& p,
                                     double inflate, double window) {
  double chi = 1.0;
  for (const Atom& a : m.atoms) {
    const double dx = p[0] - a.position[0];
    const double dy = p[1] - a.position[1];
    const double dz = p[2] - a.position[2];
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    chi = std::min(chi, spline_surface_value(d, a.radius + inflate, window));
    if (chi == 0.0) break;
  }
  return chi;
}

}  // namespace pbrom
