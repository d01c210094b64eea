#pragma once

#include <array>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>

#include "pbrom/coefficient_maps.hpp"
#include "pbrom/errors.hpp"
#include "pbrom/molecule.hpp"
#include "pbrom/pcg.hpp"

namespace pbrom {

// One run's worth of settings.  Config files use the same kebab-case keys as
// the command-line flags; flags given on the command line win over the file.
struct RunConfig {
  std::string pqr_path;

  int n = 65;
  double box_length = 0.0;  // 0 -> derived from the molecule extent
  bool center_auto = true;
  std::array<double, 3> center{0.0, 0.0, 0.0};

  double eps_in = 2.0;
  double eps_out = 78.54;
  double temperature = 298.15;
  double stern_radius = 2.0;
  double spline_window = 0.3;
  std::string face_mode = "midpoint";  // midpoint | harmonic

  double solver_tol = 1e-10;
  long solver_max_iter = 0;  // 0 -> scaled with the grid
  std::string precon = "ssor";  // ssor | jacobi

  double mu = 0.0;  // ionic strength for single solves, mol/L

  double d_lo = 0.05;
  double d_hi = 0.15;
  int train_count = 11;
  double eps_tol = 1e-3;
  double eps_svd = 1e-10;
  int max_basis = 10;
  bool track_true_error = false;
  bool with_lift = true;

  std::string out_field;
  std::string out_report;
  std::string out_container;
  std::string out_history;
  std::string out_sigma;
  std::string out_slice;
  std::string out_bench;
  int slice_axis = 2;
  int slice_index = -1;  // <0 -> center plane
};

namespace detail {

inline std::string trim_copy(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double config_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw parse_error("config key '" + key + "': cannot parse '" + v +
                      "' as a number");
  }
}

inline long config_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw parse_error("config key '" + key + "': cannot parse '" + v +
                      "' as an integer");
  }
}

inline bool config_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw parse_error("config key '" + key + "': cannot parse '" + v +
                    "' as a boolean");
}

inline std::array<double, 3> config_triple(const std::string& key,
                                           const std::string& v) {
  std::array<double, 3> out{};
  std::stringstream ss(v);
  std::string part;
  int got = 0;
  while (std::getline(ss, part, ',')) {
    if (got >= 3) ++got;  // overflow detected below
    else out[static_cast<std::size_t>(got++)] = config_double(key, trim_copy(part));
  }
  if (got != 3) {
    throw parse_error("config key '" + key + "': expected three " +
                      "comma-separated numbers, got '" + v + "'");
  }
  return out;
}

}  // namespace detail

// key = value lines; '#' starts a comment; blank lines ignored.  Later
// occurrences of a key override earlier ones.
inline std::map<std::string, std::string> parse_key_value_stream(
    std::istream& in, const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim_copy(line);
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw parse_error(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = detail::trim_copy(body.substr(0, eq));
    const std::string value = detail::trim_copy(body.substr(eq + 1));
    if (key.empty()) {
      throw parse_error(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    kv[key] = value;
  }
  return kv;
}

// Applies parsed key-value pairs onto a config.  Unknown keys are errors so
// typos surface instead of silently running with defaults.
inline void apply_config_keys(RunConfig& cfg,
                              const std::map<std::string, std::string>& kv) {
  namespace d = detail;
  for (const auto& [key, v] : kv) {
    if (key == "pqr") cfg.pqr_path = v;
    else if (key == "n") cfg.n = static_cast<int>(d::config_long(key, v));
    else if (key == "box-length") cfg.box_length = d::config_double(key, v);
    else if (key == "center") {
      cfg.center = d::config_triple(key, v);
      cfg.center_auto = false;
    } else if (key == "eps-in") cfg.eps_in = d::config_double(key, v);
    else if (key == "eps-out") cfg.eps_out = d::config_double(key, v);
    else if (key == "temperature") cfg.temperature = d::config_double(key, v);
    else if (key == "stern-radius") cfg.stern_radius = d::config_double(key, v);
    else if (key == "spline-window") cfg.spline_window = d::config_double(key, v);
    else if (key == "face-mode") cfg.face_mode = v;
    else if (key == "solver-tol") cfg.solver_tol = d::config_double(key, v);
    else if (key == "solver-max-iter") cfg.solver_max_iter = d::config_long(key, v);
    else if (key == "precon") cfg.precon = v;
    else if (key == "mu") cfg.mu = d::config_double(key, v);
    else if (key == "d-lo") cfg.d_lo = d::config_double(key, v);
    else if (key == "d-hi") cfg.d_hi = d::config_double(key, v);
    else if (key == "train-count") cfg.train_count = static_cast<int>(d::config_long(key, v));
    else if (key == "eps-tol") cfg.eps_tol = d::config_double(key, v);
    else if (key == "eps-svd") cfg.eps_svd = d::config_double(key, v);
    else if (key == "max-basis") cfg.max_basis = static_cast<int>(d::config_long(key, v));
    else if (key == "track-true-error") cfg.track_true_error = d::config_bool(key, v);
    else if (key == "with-lift") cfg.with_lift = d::config_bool(key, v);
    else if (key == "out-field") cfg.out_field = v;
    else if (key == "out-report") cfg.out_report = v;
    else if (key == "out-container") cfg.out_container = v;
    else if (key == "out-history") cfg.out_history = v;
    else if (key == "out-sigma") cfg.out_sigma = v;
    else if (key == "out-slice") cfg.out_slice = v;
    else if (key == "out-bench") cfg.out_bench = v;
    else if (key == "slice-axis") cfg.slice_axis = static_cast<int>(d::config_long(key, v));
    else if (key == "slice-index") cfg.slice_index = static_cast<int>(d::config_long(key, v));
    else throw parse_error("unknown config key '" + key + "'");
  }
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open config file '" + path + "'");
  apply_config_keys(cfg, parse_key_value_stream(in, path));
}

// Range validation independent of any molecule.
inline void validate_config(const RunConfig& cfg) {
  if (cfg.n < 9 || cfg.n % 2 == 0) {
    throw parse_error("grid size n must be odd and at least 9 (got " +
                      std::to_string(cfg.n) + ")");
  }
  if (cfg.box_length < 0.0) throw parse_error("box-length must be positive");
  if (!(cfg.eps_in > 0.0) || !(cfg.eps_out > 0.0)) {
    throw parse_error("dielectric coefficients must be positive");
  }
  if (!(cfg.temperature > 0.0)) throw parse_error("temperature must be positive");
  if (cfg.stern_radius < 0.0) throw parse_error("stern-radius must be nonnegative");
  if (!(cfg.spline_window > 0.0)) throw parse_error("spline-window must be positive");
  if (cfg.face_mode != "midpoint" && cfg.face_mode != "harmonic") {
    throw parse_error("face-mode must be 'midpoint' or 'harmonic'");
  }
  if (!(cfg.solver_tol > 0.0 && cfg.solver_tol < 1.0)) {
    throw parse_error("solver-tol must lie in (0, 1)");
  }
  if (cfg.solver_max_iter < 0) throw parse_error("solver-max-iter must be nonnegative");
  if (cfg.precon != "ssor" && cfg.precon != "jacobi") {
    throw parse_error("precon must be 'ssor' or 'jacobi'");
  }
  if (cfg.mu < 0.0) throw parse_error("mu must be nonnegative");
  if (!(cfg.d_lo >= 0.0 && cfg.d_hi > cfg.d_lo)) {
    throw parse_error("parameter bounds must satisfy 0 <= d-lo < d-hi");
  }
  if (cfg.train_count < 2) throw parse_error("train-count must be at least 2");
  if (!(cfg.eps_tol > 0.0)) throw parse_error("eps-tol must be positive");
  if (!(cfg.eps_svd > 0.0 && cfg.eps_svd < 1.0)) {
    throw parse_error("eps-svd must lie in (0, 1)");
  }
  if (cfg.max_basis < 1) throw parse_error("max-basis must be at least 1");
  if (cfg.slice_axis < 0 || cfg.slice_axis > 2) {
    throw parse_error("slice-axis must be 0, 1 or 2");
  }
}

// The grid box must strictly cover the molecule (with its radii).
inline double molecule_extent(const MoleculeModel& m) {
  const auto [lo, hi] = m.bounding_box();
  double extent = 0.0;
  for (int d = 0; d < 3; ++d) extent = std::max(extent, hi[d] - lo[d]);
  return extent;
}

inline void check_box_covers(const RunConfig& cfg, const MoleculeModel& m) {
  if (cfg.box_length <= 0.0) return;  // auto-sized later
  const double extent = molecule_extent(m);
  if (cfg.box_length <= extent) {
    std::ostringstream os;
    os << "box-length " << cfg.box_length
       << " does not cover the molecule extent " << extent;
    throw parse_error(os.str());
  }
}

inline FaceSampling face_mode_of(const RunConfig& cfg) {
  return cfg.face_mode == "harmonic" ? FaceSampling::harmonic
                                     : FaceSampling::midpoint;
}

inline PcgOptions solver_options_of(const RunConfig& cfg) {
  PcgOptions opt;
  opt.tol = cfg.solver_tol;
  opt.max_iter = cfg.solver_max_iter;
  opt.precon = cfg.precon == "jacobi" ? PreconKind::jacobi : PreconKind::ssor;
  return opt;
}

}  // namespace pbrom
