#pragma once

#include <array>
#include <utility>

#include "pbrom/boundary.hpp"
#include "pbrom/bspline.hpp"
#include "pbrom/coefficient_maps.hpp"
#include "pbrom/constants.hpp"
#include "pbrom/energy.hpp"
#include "pbrom/grid.hpp"
#include "pbrom/molecule.hpp"
#include "pbrom/operator.hpp"
#include "pbrom/pcg.hpp"

namespace pbrom {

// Everything that defines a full-order scenario before a parameter value is
// chosen.  The heterogeneous problem uses the molecular dielectric cavity and
// ion exclusion; the homogeneous reference replaces both with uniform eps_in
// and no ions, which is what solvation differences are taken against.
struct FomScenario {
  MoleculeModel molecule;
  GridSpec grid;
  double eps_in = 2.0;
  double eps_out = 78.54;
  double spline_window = 0.3;
  double stern_radius = 2.0;
  FaceSampling face_mode = FaceSampling::midpoint;
  PhysicalConstants pc = build_constants(298.15);
};

struct AssembledFom {
  CoefficientMaps maps;
  SourceField src;
  ParametricOperator op;
  BoundaryGenerator bgen;
};

inline AssembledFom assemble_fom(const FomScenario& sc,
                                 bool homogeneous = false) {
  AssembledFom a;
  if (homogeneous) {
    a.maps = build_homogeneous_maps(sc.grid, sc.eps_in);
  } else {
    a.maps = build_coefficient_maps(sc.molecule, sc.grid, sc.eps_in,
                                    sc.eps_out, sc.spline_window,
                                    sc.stern_radius, sc.face_mode);
  }
  a.src = spread_charges(sc.molecule, sc.grid, sc.pc);
  a.op = assemble_operator(sc.grid, a.maps, a.src, sc.pc);
  // The closure potential decays through the medium the boundary actually
  // sits in: the solvent for the heterogeneous problem, eps_in for the
  // uniform reference.
  a.bgen = BoundaryGenerator(sc.molecule, sc.pc,
                             homogeneous ? sc.eps_in : sc.eps_out);
  return a;
}

struct FullSolution {
  Vector interior;
  Vector boundary;
  Array3 field;  // composed n^3 nodal field
  SolveReport report;
};

inline FullSolution solve_full(const AssembledFom& a, double mu,
                               const PcgOptions& opt) {
  FullSolution s;
  s.boundary = a.op.boundary_values(a.bgen, mu);
  auto A = a.op.materialize_matrix(mu);
  const Vector f = a.op.rho + a.op.coupling * s.boundary;
  s.interior = solve_spd(A, f, opt, s.report);
  s.field = compose_full_field(a.op.grid, s.interior, s.boundary);
  return s;
}

struct SolvationResult {
  EnergyValue heterogeneous;
  EnergyValue homogeneous;
  EnergyValue difference;  // polar solvation energy
  SolveReport het_report, hom_report;
};

// Two matched solves on the same grid and source; the grid self-energy of the
// spread charges cancels in the difference.
inline SolvationResult solvation_energy(const FomScenario& sc, double mu,
                                        const PcgOptions& opt) {
  SolvationResult r;
  AssembledFom het = assemble_fom(sc, false);
  FullSolution uh = solve_full(het, mu, opt);
  r.heterogeneous =
      electrostatic_energy(sc.molecule, sc.grid, uh.field, sc.pc);
  r.het_report = uh.report;

  AssembledFom hom = assemble_fom(sc, true);
  FullSolution u0 = solve_full(hom, 0.0, opt);
  r.homogeneous =
      electrostatic_energy(sc.molecule, sc.grid, u0.field, sc.pc);
  r.hom_report = u0.report;

  r.difference.kT = r.heterogeneous.kT - r.homogeneous.kT;
  r.difference.kJ_per_mol =
      r.heterogeneous.kJ_per_mol - r.homogeneous.kJ_per_mol;
  return r;
}

// Centers the grid on the molecule unless a center was supplied.
inline GridSpec make_grid(const MoleculeModel& m, std::size_t n,
                          double box_length) {
  GridSpec g;
  g.n = n;
  g.box_length = box_length;
  g.center = m.center_of_geometry();
  g.validate();
  return g;
}

}  // namespace pbrom
