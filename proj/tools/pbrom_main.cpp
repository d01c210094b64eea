// Command-line front end: full-order solves, reduced-model construction and
// evaluation, benchmarking, and closed-form validation.
//
// Exit codes: 1 bad input or flags, 2 model assembly failure, 3 linear or
// reduced solver failure, 4 file I/O failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pbrom/pbrom.hpp"

using json = nlohmann::ordered_json;
using namespace pbrom;

namespace {

struct CliState {
  RunConfig cfg;
  std::string config_path;   // consumed in the pre-scan, accepted here
  std::string container_in;  // reduced-model input for `rom solve`
  std::vector<double> mus;   // evaluation points for `rom solve`
  // Closed-form validation inputs.
  double val_q = 1.0;
  double val_radius = 3.0;
  double val_eps_in = 1.0;
  double val_eps_out = 78.54;
};

// Registers the shared run-configuration flags on a leaf command.  CLI11 only
// touches a bound variable when its flag is present, so values loaded from
// --config survive unless overridden on the command line.
void add_common_options(CLI::App* sub, CliState& st) {
  RunConfig& c = st.cfg;
  sub->add_option("--config", st.config_path,
                  "key = value file applied before other flags");
  sub->add_option("--pqr", c.pqr_path, "input molecule (PQR format)");
  sub->add_option("--n", c.n, "nodes per axis (odd, >= 9)");
  sub->add_option("--box-length", c.box_length,
                  "cube edge in Angstrom (0: twice the molecule extent)");
  sub->add_option("--center", c.center, "grid center x,y,z (default: molecule)")
      ->delimiter(',')
      ->expected(1, 3);
  sub->add_option("--eps-in", c.eps_in, "solute dielectric");
  sub->add_option("--eps-out", c.eps_out, "solvent dielectric");
  sub->add_option("--temperature", c.temperature, "temperature in K");
  sub->add_option("--stern-radius", c.stern_radius,
                  "ion-exclusion radius increment in Angstrom");
  sub->add_option("--spline-window", c.spline_window,
                  "half-width of the dielectric transition in Angstrom");
  sub->add_option("--face-mode", c.face_mode,
                  "face dielectric rule: midpoint | harmonic");
  sub->add_option("--solver-tol", c.solver_tol, "relative residual target");
  sub->add_option("--solver-max-iter", c.solver_max_iter,
                  "iteration cap (0: scaled with the grid)");
  sub->add_option("--precon", c.precon, "preconditioner: ssor | jacobi");
  sub->add_option("--mu", c.mu, "ionic strength in mol/L");
  sub->add_option("--d-lo", c.d_lo, "parameter domain lower bound");
  sub->add_option("--d-hi", c.d_hi, "parameter domain upper bound");
  sub->add_option("--train-count", c.train_count, "training samples across the domain");
  sub->add_option("--eps-tol", c.eps_tol, "greedy stopping tolerance");
  sub->add_option("--eps-svd", c.eps_svd, "singular-value tail cut");
  sub->add_option("--max-basis", c.max_basis, "reduced-basis size cap");
  sub->add_flag("--track-true-error,!--no-track-true-error",
                c.track_true_error,
                "also record exact errors during training (slow)");
  sub->add_flag("--with-lift,!--no-lift", c.with_lift,
                "store the lifted bases in the container");
  sub->add_option("--out-field", c.out_field, "write the nodal field (binary)");
  sub->add_option("--out-report", c.out_report, "write the JSON report");
  sub->add_option("--out-container", c.out_container,
                  "write the reduced-model container");
  sub->add_option("--out-history", c.out_history, "write greedy history CSV");
  sub->add_option("--out-sigma", c.out_sigma, "write singular-value CSV");
  sub->add_option("--out-slice", c.out_slice, "write a plane of the field as CSV");
  sub->add_option("--out-bench", c.out_bench, "write the timing table CSV");
  sub->add_option("--slice-axis", c.slice_axis, "slice normal axis: 0|1|2");
  sub->add_option("--slice-index", c.slice_index,
                  "slice plane index (negative: center)");
}

MoleculeModel load_molecule(const RunConfig& cfg) {
  if (cfg.pqr_path.empty()) {
    throw parse_error("--pqr is required for this command");
  }
  return parse_pqr_file(cfg.pqr_path);
}

GridSpec grid_of(const RunConfig& cfg, const MoleculeModel& m) {
  double box = cfg.box_length;
  if (box <= 0.0) {
    box = std::max(2.0 * molecule_extent(m), 8.0);
  } else {
    check_box_covers(cfg, m);
  }
  GridSpec g;
  g.n = static_cast<std::size_t>(cfg.n);
  g.box_length = box;
  g.center = cfg.center_auto ? m.center_of_geometry() : cfg.center;
  g.validate();
  return g;
}

FomScenario scenario_of(const RunConfig& cfg, MoleculeModel m, GridSpec g) {
  FomScenario sc;
  sc.molecule = std::move(m);
  sc.grid = g;
  sc.eps_in = cfg.eps_in;
  sc.eps_out = cfg.eps_out;
  sc.spline_window = cfg.spline_window;
  sc.stern_radius = cfg.stern_radius;
  sc.face_mode = face_mode_of(cfg);
  sc.pc = build_constants(cfg.temperature);
  return sc;
}

std::size_t slice_index_of(const RunConfig& cfg, const GridSpec& g) {
  return cfg.slice_index < 0 ? g.n / 2
                             : static_cast<std::size_t>(cfg.slice_index);
}

void emit_report(const json& rep, const std::string& path) {
  std::cout << rep.dump(2) << "\n";
  if (!path.empty()) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << rep.dump(2) << "\n";
    if (!out) throw io_error("short write to '" + path + "'");
  }
}

// Boundary data in the grid's boundary enumeration order, evaluated directly
// from the closure potential.
Vector boundary_of(const GridSpec& g, const BoundaryGenerator& bgen,
                   double mu) {
  const auto nodes = g.boundary_nodes();
  Vector b(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    b[static_cast<Eigen::Index>(q)] =
        bgen.value(g.node_position(nodes[q].i, nodes[q].j, nodes[q].k), mu);
  }
  return b;
}

int run_solve(const CliState& st) {
  const RunConfig& cfg = st.cfg;
  validate_config(cfg);
  const MoleculeModel mol = load_molecule(cfg);
  const GridSpec g = grid_of(cfg, mol);
  const FomScenario sc = scenario_of(cfg, mol, g);
  const AssembledFom fom = assemble_fom(sc);
  const FullSolution sol = solve_full(fom, cfg.mu, solver_options_of(cfg));
  const EnergyValue energy = electrostatic_energy(mol, g, sol.field, sc.pc);

  if (!cfg.out_field.empty()) {
    write_grid_container_file(cfg.out_field, g, sol.field);
  }
  if (!cfg.out_slice.empty()) {
    write_slice_csv_file(cfg.out_slice, sol.field, g, cfg.slice_axis,
                         slice_index_of(cfg, g));
  }

  json rep;
  rep["command"] = "solve";
  rep["pqr"] = cfg.pqr_path;
  rep["atoms"] = mol.atoms.size();
  rep["n"] = g.n;
  rep["box_length"] = g.box_length;
  rep["spacing"] = g.spacing();
  rep["mu"] = cfg.mu;
  rep["iterations"] = sol.report.iterations;
  rep["converged"] = sol.report.converged;
  rep["final_relative_residual"] = sol.report.final_relative_residual;
  rep["solve_time_s"] = sol.report.wall_time;
  rep["energy_kT"] = energy.kT;
  rep["energy_kJ_per_mol"] = energy.kJ_per_mol;
  emit_report(rep, cfg.out_report);
  return 0;
}

int run_energy(const CliState& st) {
  const RunConfig& cfg = st.cfg;
  validate_config(cfg);
  const MoleculeModel mol = load_molecule(cfg);
  const GridSpec g = grid_of(cfg, mol);
  const FomScenario sc = scenario_of(cfg, mol, g);
  const SolvationResult r = solvation_energy(sc, cfg.mu, solver_options_of(cfg));

  json rep;
  rep["command"] = "energy";
  rep["pqr"] = cfg.pqr_path;
  rep["n"] = g.n;
  rep["box_length"] = g.box_length;
  rep["mu"] = cfg.mu;
  rep["heterogeneous_kT"] = r.heterogeneous.kT;
  rep["homogeneous_kT"] = r.homogeneous.kT;
  rep["solvation_kT"] = r.difference.kT;
  rep["solvation_kJ_per_mol"] = r.difference.kJ_per_mol;
  rep["het_iterations"] = r.het_report.iterations;
  rep["hom_iterations"] = r.hom_report.iterations;
  emit_report(rep, cfg.out_report);
  return 0;
}

int run_validate_born(const CliState& st) {
  const double e = born_analytic_kJ_per_mol(st.val_q, st.val_radius,
                                            st.val_eps_in, st.val_eps_out);
  json rep;
  rep["command"] = "validate born";
  rep["q"] = st.val_q;
  rep["radius"] = st.val_radius;
  rep["eps_in"] = st.val_eps_in;
  rep["eps_out"] = st.val_eps_out;
  rep["energy_kJ_per_mol"] = e;
  emit_report(rep, st.cfg.out_report);
  return 0;
}

int run_rom_build(const CliState& st) {
  const RunConfig& cfg = st.cfg;
  validate_config(cfg);
  const MoleculeModel mol = load_molecule(cfg);
  const GridSpec g = grid_of(cfg, mol);
  const FomScenario sc = scenario_of(cfg, mol, g);

  double assemble_ms = 0.0, deim_ms = 0.0, greedy_ms = 0.0;
  AssembledFom fom;
  assemble_ms = time_once_ms([&] { fom = assemble_fom(sc); });

  const TrainingSet train = make_training_set(
      cfg.d_lo, cfg.d_hi, static_cast<std::size_t>(cfg.train_count));

  DeimModel deim;
  deim_ms = time_once_ms([&] {
    const auto snap = build_snapshots_b(fom.op, fom.bgen, train.samples);
    deim = DeimModel(pod_truncate(snap.F, cfg.eps_svd), fom.op);
  });

  GreedyOptions gopt;
  gopt.eps_tol = cfg.eps_tol;
  gopt.max_N = cfg.max_basis;
  gopt.fom = solver_options_of(cfg);
  gopt.track_true_error = cfg.track_true_error;
  GreedyResult res;
  greedy_ms = time_once_ms(
      [&] { res = greedy_build(fom.op, fom.bgen, train, deim, gopt); });

  if (!cfg.out_container.empty()) {
    RomBundle bundle;
    bundle.grid = g;
    bundle.temperature = cfg.temperature;
    bundle.eps_solvent = cfg.eps_out;
    bundle.molecule = mol;
    bundle.train = train;
    bundle.basis = res.basis;
    bundle.model = res.model;
    bundle.deim = deim;
    bundle.with_lift = cfg.with_lift;
    write_rom_container_file(cfg.out_container, bundle);
  }
  if (!cfg.out_history.empty()) {
    std::ofstream out(cfg.out_history);
    if (!out) throw io_error("cannot open '" + cfg.out_history + "' for writing");
    write_history_csv(out, res.history);
  }
  if (!cfg.out_sigma.empty()) {
    std::ofstream out(cfg.out_sigma);
    if (!out) throw io_error("cannot open '" + cfg.out_sigma + "' for writing");
    write_singular_values_csv(out, deim.singular_values());
  }

  json rep;
  rep["command"] = "rom build";
  rep["pqr"] = cfg.pqr_path;
  rep["n"] = g.n;
  rep["box_length"] = g.box_length;
  rep["domain"] = {cfg.d_lo, cfg.d_hi};
  rep["train_count"] = cfg.train_count;
  rep["basis_size"] = res.basis.size();
  rep["deim_rank"] = deim.r();
  rep["deim_rank_extended"] = deim.rstar();
  rep["converged"] = res.converged;
  rep["deflated"] = res.deflated;
  rep["selected_mus"] = res.basis.selected_mus;
  rep["final_delta_max"] =
      res.history.empty() ? 0.0 : res.history.back().delta_max;
  rep["with_lift"] = cfg.with_lift;
  rep["assemble_time_ms"] = assemble_ms;
  rep["interpolation_time_ms"] = deim_ms;
  rep["greedy_time_ms"] = greedy_ms;
  rep["offline_time_ms"] = assemble_ms + deim_ms + greedy_ms;
  if (!cfg.out_container.empty()) rep["container"] = cfg.out_container;
  emit_report(rep, cfg.out_report);
  return 0;
}

// "name.ext" -> "name_3.ext"; used when several evaluation points each
// produce a file.
std::string indexed_path(const std::string& path, std::size_t k) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of("/\\");
  const bool has_ext =
      dot != std::string::npos && (slash == std::string::npos || dot > slash);
  if (!has_ext) return path + "_" + std::to_string(k);
  return path.substr(0, dot) + "_" + std::to_string(k) + path.substr(dot);
}

int run_rom_solve(const CliState& st) {
  const RunConfig& cfg = st.cfg;
  if (st.container_in.empty()) {
    throw parse_error("--container is required for 'rom solve'");
  }
  if (st.mus.empty()) {
    throw parse_error("at least one --mu value is required for 'rom solve'");
  }
  for (const double mu : st.mus) {
    if (!(mu >= 0.0)) throw parse_error("mu must be nonnegative");
  }

  RomBundle bundle;
  const double load_ms = time_once_ms(
      [&] { bundle = read_rom_container_file(st.container_in); });

  const PhysicalConstants pc = build_constants(bundle.temperature);
  const BoundaryGenerator bgen(bundle.molecule, pc, bundle.eps_solvent);

  const bool needs_field = !cfg.out_field.empty() || !cfg.out_slice.empty();
  if (needs_field && !bundle.with_lift) {
    throw io_error(
        "container was saved without the lifted basis; cannot write fields");
  }

  json rep;
  rep["command"] = "rom solve";
  rep["container"] = st.container_in;
  rep["basis_size"] = bundle.model.dim();
  rep["load_time_ms"] = load_ms;
  json results = json::array();
  double total_solve_ms = 0.0;

  for (std::size_t k = 0; k < st.mus.size(); ++k) {
    const double mu = st.mus[k];
    const bool inside = bundle.model.in_domain(mu);
    if (!inside) {
      std::fprintf(stderr,
                   "warning: mu=%g lies outside the trained domain [%g, %g]; "
                   "extrapolating\n",
                   mu, bundle.model.d_lo, bundle.model.d_hi);
    }

    Vector uN;
    const double solve_ms = time_once_ms(
        [&] { uN = rom_solve(bundle.model, bundle.deim, bgen, mu); });
    total_solve_ms += solve_ms;

    json row;
    row["mu"] = mu;
    row["in_domain"] = inside;
    row["solve_time_ms"] = solve_ms;
    row["coefficients"] = std::vector<double>(uN.data(), uN.data() + uN.size());

    if (bundle.with_lift) {
      const Vector lifted = bundle.basis.V * uN;
      const Vector bvals = boundary_of(bundle.grid, bgen, mu);
      const Array3 field = compose_full_field(bundle.grid, lifted, bvals);
      const EnergyValue energy =
          electrostatic_energy(bundle.molecule, bundle.grid, field, pc);
      row["energy_kT"] = energy.kT;
      row["energy_kJ_per_mol"] = energy.kJ_per_mol;
      const bool many = st.mus.size() > 1;
      if (!cfg.out_field.empty()) {
        const std::string p =
            many ? indexed_path(cfg.out_field, k) : cfg.out_field;
        write_grid_container_file(p, bundle.grid, field);
      }
      if (!cfg.out_slice.empty()) {
        const std::string p =
            many ? indexed_path(cfg.out_slice, k) : cfg.out_slice;
        write_slice_csv_file(p, field, bundle.grid, cfg.slice_axis,
                             slice_index_of(cfg, bundle.grid));
      }
    }
    results.push_back(std::move(row));
  }

  rep["total_solve_time_ms"] = total_solve_ms;
  rep["results"] = std::move(results);
  emit_report(rep, cfg.out_report);
  return 0;
}

int run_bench(const CliState& st) {
  const RunConfig& cfg = st.cfg;
  validate_config(cfg);
  const MoleculeModel mol = load_molecule(cfg);
  const GridSpec g = grid_of(cfg, mol);
  const FomScenario sc = scenario_of(cfg, mol, g);
  const PcgOptions sopt = solver_options_of(cfg);
  const double mu_mid = 0.5 * (cfg.d_lo + cfg.d_hi);

  const double fom_assemble_ms =
      median_time_ms([&] { AssembledFom a = assemble_fom(sc); });

  AssembledFom fom = assemble_fom(sc);
  const double fom_solve_ms = median_time_ms([&] {
    SolveReport rep;
    solve_fom(fom.op, fom.bgen, mu_mid, sopt, rep);
  });

  const TrainingSet train = make_training_set(
      cfg.d_lo, cfg.d_hi, static_cast<std::size_t>(cfg.train_count));
  DeimModel deim;
  GreedyResult res;
  const double offline_ms = time_once_ms([&] {
    const auto snap = build_snapshots_b(fom.op, fom.bgen, train.samples);
    deim = DeimModel(pod_truncate(snap.F, cfg.eps_svd), fom.op);
    GreedyOptions gopt;
    gopt.eps_tol = cfg.eps_tol;
    gopt.max_N = cfg.max_basis;
    gopt.fom = sopt;
    res = greedy_build(fom.op, fom.bgen, train, deim, gopt);
  });

  const double rom_solve_ms = median_time_ms(
      [&] { rom_solve(res.model, deim, fom.bgen, mu_mid); });

  // Estimator sweep over the training set, interpolated boundary term.
  const double est_deim_ms = median_time_ms([&] {
    for (const double mu : train.samples) {
      const Vector uN = rom_solve(res.model, deim, fom.bgen, mu);
      estimate_error(fom.op, res.model, res.basis, uN, fom.bgen, mu, deim);
    }
  });
  // The same sweep with the boundary term evaluated at every boundary node.
  const double est_full_ms = median_time_ms([&] {
    for (const double mu : train.samples) {
      const Vector uN = rom_solve(res.model, deim, fom.bgen, mu);
      const Vector b = fom.op.coupling * fom.op.boundary_values(fom.bgen, mu);
      const Vector r =
          fom.op.rho + b - fom.op.apply(mu, res.basis.V * uN);
      volatile double sink = r.norm();
      (void)sink;
    }
  });

  json rep;
  rep["command"] = "bench";
  rep["pqr"] = cfg.pqr_path;
  rep["n"] = g.n;
  rep["box_length"] = g.box_length;
  rep["mu"] = mu_mid;
  rep["basis_size"] = res.basis.size();
  rep["deim_rank"] = deim.r();
  rep["reps"] = 5;
  rep["fom_assemble_ms"] = fom_assemble_ms;
  rep["fom_solve_ms"] = fom_solve_ms;
  rep["offline_total_ms"] = offline_ms;
  rep["rom_solve_ms"] = rom_solve_ms;
  rep["estimator_sweep_interpolated_ms"] = est_deim_ms;
  rep["estimator_sweep_full_ms"] = est_full_ms;
  rep["speedup_fom_over_rom"] =
      rom_solve_ms > 0.0 ? fom_solve_ms / rom_solve_ms : 0.0;
  rep["speedup_estimator"] =
      est_deim_ms > 0.0 ? est_full_ms / est_deim_ms : 0.0;

  if (!cfg.out_bench.empty()) {
    std::ofstream out(cfg.out_bench);
    if (!out) throw io_error("cannot open '" + cfg.out_bench + "' for writing");
    out << "metric,value\n" << std::setprecision(17);
    for (const auto& [key, value] : rep.items()) {
      if (value.is_number()) {
        out << key << ',' << value.get<double>() << '\n';
      }
    }
    if (!out) throw io_error("short write to '" + cfg.out_bench + "'");
  }
  emit_report(rep, cfg.out_report);
  return 0;
}

// The --config file loads before CLI11 sees the other flags, so flags given
// on the command line override file values.
void preload_config(int argc, char** argv, RunConfig& cfg) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) {
      load_config_file(cfg, argv[i + 1]);
    } else if (a.rfind("--config=", 0) == 0) {
      load_config_file(cfg, a.substr(9));
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CliState st;
  CLI::App app{
      "Linearized Poisson-Boltzmann solver with a certified reduced-order "
      "model over ionic strength"};
  app.require_subcommand(1);
  app.fallthrough(false);

  CLI::App* solve = app.add_subcommand("solve", "full-order solve at one ionic strength");
  CLI::App* energy = app.add_subcommand("energy", "polar solvation energy (two matched solves)");
  CLI::App* rom = app.add_subcommand("rom", "reduced-order model commands");
  rom->require_subcommand(1);
  CLI::App* rom_build = rom->add_subcommand("build", "offline stage: greedy basis + boundary interpolation");
  CLI::App* rom_solve_cmd = rom->add_subcommand("solve", "online stage: evaluate a stored reduced model");
  CLI::App* bench = app.add_subcommand("bench", "timing table: full order vs reduced order");
  CLI::App* validate = app.add_subcommand("validate", "closed-form validation cases");
  validate->require_subcommand(1);
  CLI::App* val_born = validate->add_subcommand("born", "spherical-ion transfer energy");

  for (CLI::App* sub : {solve, energy, rom_build, bench}) {
    add_common_options(sub, st);
  }
  rom_solve_cmd->add_option("--config", st.config_path,
                            "key = value file applied before other flags");
  rom_solve_cmd->add_option("--container", st.container_in,
                            "reduced-model container to evaluate");
  rom_solve_cmd
      ->add_option("--mu", st.mus, "ionic strengths in mol/L (repeatable)")
      ->delimiter(',');
  rom_solve_cmd->add_option("--out-field", st.cfg.out_field,
                            "write the nodal field(s) (binary)");
  rom_solve_cmd->add_option("--out-slice", st.cfg.out_slice,
                            "write a plane of the field(s) as CSV");
  rom_solve_cmd->add_option("--out-report", st.cfg.out_report,
                            "write the JSON report");
  rom_solve_cmd->add_option("--slice-axis", st.cfg.slice_axis,
                            "slice normal axis: 0|1|2");
  rom_solve_cmd->add_option("--slice-index", st.cfg.slice_index,
                            "slice plane index (negative: center)");
  val_born->add_option("--q", st.val_q, "charge in elementary units");
  val_born->add_option("--radius", st.val_radius, "cavity radius in Angstrom");
  val_born->add_option("--eps-in", st.val_eps_in, "solute dielectric");
  val_born->add_option("--eps-out", st.val_eps_out, "solvent dielectric");
  val_born->add_option("--out-report", st.cfg.out_report, "write the JSON report");

  try {
    preload_config(argc, argv, st.cfg);
    app.parse(argc, argv);

    // A parsed --center implies an explicit grid center.
    for (CLI::App* sub : {solve, energy, rom_build, bench}) {
      if (sub->count("--center") > 0) st.cfg.center_auto = false;
    }

    if (solve->parsed()) return run_solve(st);
    if (energy->parsed()) return run_energy(st);
    if (rom->parsed() && rom_build->parsed()) return run_rom_build(st);
    if (rom->parsed() && rom_solve_cmd->parsed()) return run_rom_solve(st);
    if (bench->parsed()) return run_bench(st);
    if (validate->parsed() && val_born->parsed()) return run_validate_born(st);
    return 1;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const assembly_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const solver_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
