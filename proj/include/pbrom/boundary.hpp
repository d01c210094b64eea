#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "pbrom/constants.hpp"
#include "pbrom/errors.hpp"
#include "pbrom/molecule.hpp"

namespace pbrom {

// Dirichlet closure: superposed screened single-sphere potentials
//   u(x; mu) = (bjerrum/eps_w) * sum_i z_i exp(-kappa (d_i - a_i))
//                                / ((1 + kappa a_i) d_i),
// with d_i = |x - x_i| and kappa = sqrt(kappa2_per_ionic_strength * mu /
// eps_w).  The only parameter dependence is through kappa, which makes the
// boundary data non-affine in the ionic strength mu.
//
// value() keeps a running evaluation count so tests can assert how many
// boundary-node evaluations an online reduced solve actually performs.
class BoundaryGenerator {
 public:
  BoundaryGenerator() = default;
  BoundaryGenerator(MoleculeModel molecule, PhysicalConstants pc,
                    double eps_solvent)
      : molecule_(std::move(molecule)), pc_(pc), eps_solvent_(eps_solvent) {
    if (!(eps_solvent_ > 0.0) || !std::isfinite(eps_solvent_)) {
      throw assembly_error("solvent dielectric must be positive and finite");
    }
  }

  double kappa(double mu) const {
    if (mu < 0.0) throw assembly_error("ionic strength must be >= 0");
    return std::sqrt(pc_.kappa2_per_ionic_strength * mu / eps_solvent_);
  }

  double value(const std::array<double, 3>& x, double mu) const {
    ++eval_count_;
    const double kap = kappa(mu);
    const double scale = pc_.bjerrum_scale / eps_solvent_;
    double u = 0.0;
    for (const Atom& a : molecule_.atoms) {
      const double dx = x[0] - a.position[0];
      const double dy = x[1] - a.position[1];
      const double dz = x[2] - a.position[2];
      const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
      if (d <= 0.0) {
        throw assembly_error(
            "boundary node coincides with an atom position (d = 0)");
      }
      u += a.charge * std::exp(-kap * (d - a.radius)) /
           ((1.0 + kap * a.radius) * d);
    }
    return scale * u;
  }

  const MoleculeModel& molecule() const { return molecule_; }
  const PhysicalConstants& constants() const { return pc_; }
  double eps_solvent() const { return eps_solvent_; }

  long eval_count() const { return eval_count_; }
  void reset_eval_count() const { eval_count_ = 0; }

 private:
  MoleculeModel molecule_;
  PhysicalConstants pc_{};
  double eps_solvent_ = 0.0;
  mutable long eval_count_ = 0;
};

}  // namespace pbrom
