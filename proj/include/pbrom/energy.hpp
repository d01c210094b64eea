#pragma once

#include <cmath>

#include "pbrom/array3.hpp"
#include "pbrom/bspline.hpp"
#include "pbrom/constants.hpp"
#include "pbrom/errors.hpp"
#include "pbrom/grid.hpp"
#include "pbrom/molecule.hpp"

namespace pbrom {

struct EnergyValue {
  double kT = 0.0;          // per system, units of k_B T
  double kJ_per_mol = 0.0;  // scaled by k_B T N_A
};

// G = 1/2 sum_i z_i u(x_i) with the potential read back at the atom sites by
// the same B-spline weights used to spread the charges, so the sum equals the
// node-space inner product of the spread charge with the field.
inline EnergyValue electrostatic_energy(const MoleculeModel& m,
                                        const GridSpec& g, const Array3& u,
                                        const PhysicalConstants& pc) {
  if (u.nx() != g.n || u.ny() != g.n || u.nz() != g.n) {
    throw assembly_error("field dimensions do not match the grid");
  }
  double acc = 0.0;
  for (const Atom& a : m.atoms) {
    acc += a.charge * interpolate_field(u, g, a.position);
  }
  EnergyValue e;
  e.kT = 0.5 * acc;
  e.kJ_per_mol = e.kT * pc.kT_to_kJ_per_mol;
  return e;
}

// Analytic Born transfer energy for a single charge q (in e) in a spherical
// cavity of radius r (Angstrom) moved from a uniform eps_in medium into
// eps_out, in kJ/mol.  Evaluates to -230.6167 for q=1, r=3, 1 -> 78.54.
inline double born_analytic_kJ_per_mol(double q, double radius, double eps_in,
                                       double eps_out) {
  if (!(radius > 0.0)) throw assembly_error("Born radius must be > 0");
  return 0.5 * kCoulombKJMolAng * q * q / radius *
         (1.0 / eps_out - 1.0 / eps_in);
}

}  // namespace pbrom
