#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pbrom/errors.hpp"

namespace pbrom {

struct Atom {
  std::array<double, 3> position;  // Angstrom
  double charge;                   // elementary charges
  double radius;                   // Angstrom
};

struct MoleculeModel {
  std::vector<Atom> atoms;  // input order preserved

  double total_charge() const {
    double q = 0.0;
    for (const Atom& a : atoms) q += a.charge;
    return q;
  }

  // Axis-aligned box containing every atom sphere (position +/- radius).
  struct Box {
    std::array<double, 3> lo;
    std::array<double, 3> hi;
  };
  Box bounding_box() const {
    if (atoms.empty()) throw assembly_error("bounding box of empty molecule");
    Box b{{std::numeric_limits<double>::max(),
           std::numeric_limits<double>::max(),
           std::numeric_limits<double>::max()},
          {std::numeric_limits<double>::lowest(),
           std::numeric_limits<double>::lowest(),
           std::numeric_limits<double>::lowest()}};
    for (const Atom& a : atoms) {
      for (int d = 0; d < 3; ++d) {
        b.lo[d] = std::min(b.lo[d], a.position[d] - a.radius);
        b.hi[d] = std::max(b.hi[d], a.position[d] + a.radius);
      }
    }
    return b;
  }

  std::array<double, 3> center_of_geometry() const {
    if (atoms.empty()) {
      throw assembly_error("center of geometry of empty molecule");
    }
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (const Atom& a : atoms) {
      for (int d = 0; d < 3; ++d) c[d] += a.position[d];
    }
    for (int d = 0; d < 3; ++d) c[d] /= static_cast<double>(atoms.size());
    return c;
  }
};

namespace detail {

inline bool parse_double_token(const std::string& tok, double& out) {
  std::size_t pos = 0;
  try {
    out = std::stod(tok, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == tok.size() && std::isfinite(out);
}

}  // namespace detail

// Reads a PQR-style structure: every line starting with ATOM or HETATM
// contributes one atom.  Column layouts in the wild disagree on the name and
// residue fields, so the geometry is taken from the last five whitespace
// separated tokens of the line: x y z charge radius.  Anything else on the
// line is ignored.  Lines that do not start with ATOM/HETATM are skipped.
inline MoleculeModel parse_pqr(std::istream& in,
                               const std::string& origin = "<stream>") {
  MoleculeModel m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens[0] != "ATOM" && tokens[0] != "HETATM") continue;
    if (tokens.size() < 6) {
      throw parse_error(origin + ":" + std::to_string(lineno) +
                        ": atom record has fewer than five numeric fields");
    }
    double v[5];
    for (int f = 0; f < 5; ++f) {
      const std::string& tok = tokens[tokens.size() - 5 + f];
      if (!detail::parse_double_token(tok, v[f])) {
        throw parse_error(origin + ":" + std::to_string(lineno) +
                          ": cannot parse '" + tok + "' as a finite number");
      }
    }
    Atom a;
    a.position = {v[0], v[1], v[2]};
    a.charge = v[3];
    a.radius = v[4];
    if (a.radius < 0.0) {
      throw parse_error(origin + ":" + std::to_string(lineno) +
                        ": negative radius");
    }
    m.atoms.push_back(a);
  }
  if (m.atoms.empty()) {
    throw parse_error(origin + ": no ATOM/HETATM records found");
  }
  return m;
}

inline MoleculeModel parse_pqr_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open PQR file '" + path + "'");
  return parse_pqr(in, path);
}

// Serializes atoms back to PQR with full double precision; parsing the output
// reproduces the model exactly.
inline void write_pqr(std::ostream& out, const MoleculeModel& m) {
  out << std::setprecision(17);
  std::size_t serial = 0;
  for (const Atom& a : m.atoms) {
    ++serial;
    out << "ATOM " << serial << " X UNK 1 " << a.position[0] << ' '
        << a.position[1] << ' ' << a.position[2] << ' ' << a.charge << ' '
        << a.radius << '\n';
  }
}

inline void write_pqr_file(const std::string& path, const MoleculeModel& m) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  write_pqr(out, m);
  if (!out) throw io_error("short write to '" + path + "'");
}

}  // namespace pbrom
