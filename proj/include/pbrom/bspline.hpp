#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "pbrom/array3.hpp"
#include "pbrom/constants.hpp"
#include "pbrom/errors.hpp"
#include "pbrom/grid.hpp"
#include "pbrom/molecule.hpp"

namespace pbrom {

// Centered cubic B-spline, support (-2, 2); integer samples 1/6, 4/6, 1/6.
inline double cubic_bspline(double t) {
  t = std::fabs(t);
  if (t >= 2.0) return 0.0;
  if (t >= 1.0) {
    const double u = 2.0 - t;
    return u * u * u / 6.0;
  }
  return (4.0 - 6.0 * t * t + 3.0 * t * t * t) / 6.0;
}

// Per-axis stencil of a particle-mesh assignment: the four consecutive nodes
// whose B-spline windows cover the continuous grid coordinate s, with their
// weights.  The weights sum to 1 by the partition-of-unity property.
struct AxisWeights {
  long base;                     // first node index (may touch the boundary)
  std::array<double, 4> w;
};

inline AxisWeights axis_weights(double s) {
  AxisWeights aw;
  const double fl = std::floor(s);
  aw.base = static_cast<long>(fl) - 1;
  for (int q = 0; q < 4; ++q) {
    aw.w[q] = cubic_bspline(s - static_cast<double>(aw.base + q));
  }
  return aw;
}

// Scaled grid source: rho = H * C * (spread charge density), i.e. per node
// C * sum_i z_i w_i(node) with C = 4 pi * bjerrum_scale.  H and C are kept
// for diagnostics and for consistency checks against the operator scaling.
struct SourceField {
  Array3 rho;
  double H = 0.0;  // dx*dy*dz
  double C = 0.0;  // 4 pi e^2/(k_B T), Angstrom
};

namespace detail {

// Atoms must keep two spacings of clearance so their assignment window stays
// strictly inside the node lattice.
inline void check_margin(const MoleculeModel& m, const GridSpec& g) {
  const double h = g.spacing();
  for (std::size_t ia = 0; ia < m.atoms.size(); ++ia) {
    for (int d = 0; d < 3; ++d) {
      const double lo = g.center[d] - 0.5 * g.box_length;
      const double hi = g.center[d] + 0.5 * g.box_length;
      const double x = m.atoms[ia].position[d];
      if (!(x >= lo + 2.0 * h && x <= hi - 2.0 * h)) {
        throw assembly_error("atom " + std::to_string(ia) +
                             " is closer than two grid spacings to the box "
                             "boundary (axis " +
                             std::to_string(d) + ")");
      }
    }
  }
}

}  // namespace detail

// Spreads the atomic point charges onto the lattice with tensor-product
// cubic B-spline weights and applies the H*C source scaling.
inline SourceField spread_charges(const MoleculeModel& m, const GridSpec& g,
                                  const PhysicalConstants& pc) {
  g.validate();
  detail::check_margin(m, g);
  const double h = g.spacing();
  SourceField src;
  src.H = g.cell_volume();
  src.C = 4.0 * M_PI * pc.bjerrum_scale;
  src.rho = Array3(g.n, g.n, g.n, 0.0);
  for (const Atom& a : m.atoms) {
    AxisWeights wx =
        axis_weights((a.position[0] - g.coord(0, 0)) / h);
    AxisWeights wy =
        axis_weights((a.position[1] - g.coord(0, 1)) / h);
    AxisWeights wz =
        axis_weights((a.position[2] - g.coord(0, 2)) / h);
    for (int qz = 0; qz < 4; ++qz) {
      for (int qy = 0; qy < 4; ++qy) {
        for (int qx = 0; qx < 4; ++qx) {
          const double w = wx.w[qx] * wy.w[qy] * wz.w[qz];
          if (w == 0.0) continue;
          src.rho(static_cast<std::size_t>(wx.base + qx),
                  static_cast<std::size_t>(wy.base + qy),
                  static_cast<std::size_t>(wz.base + qz)) +=
              src.C * a.charge * w;
        }
      }
    }
  }
  return src;
}

// B-spline interpolation of a nodal field at an arbitrary point with the same
// weights as spread_charges; the two operations are adjoint, so energies
// evaluated either way agree.
inline double interpolate_field(const Array3& field, const GridSpec& g,
                                const std::array<double, 3>& p) {
  const double h = g.spacing();
  AxisWeights wx = axis_weights((p[0] - g.coord(0, 0)) / h);
  AxisWeights wy = axis_weights((p[1] - g.coord(0, 1)) / h);
  AxisWeights wz = axis_weights((p[2] - g.coord(0, 2)) / h);
  double v = 0.0;
  for (int qz = 0; qz < 4; ++qz) {
    for (int qy = 0; qy < 4; ++qy) {
      for (int qx = 0; qx < 4; ++qx) {
        const double w = wx.w[qx] * wy.w[qy] * wz.w[qz];
        if (w == 0.0) continue;
        v += w * field(static_cast<std::size_t>(wx.base + qx),
                       static_cast<std::size_t>(wy.base + qy),
                       static_cast<std::size_t>(wz.base + qz));
      }
    }
  }
  return v;
}

}  // namespace pbrom
