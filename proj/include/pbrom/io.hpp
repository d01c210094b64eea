#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "pbrom/array3.hpp"
#include "pbrom/boundary.hpp"
#include "pbrom/deim.hpp"
#include "pbrom/errors.hpp"
#include "pbrom/grid.hpp"
#include "pbrom/molecule.hpp"
#include "pbrom/rom.hpp"

namespace pbrom {

// Binary layouts are little-endian with float64 payloads; matrices are
// stored column-major.  Containers round-trip bit exactly.

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

namespace detail {

inline void put_bytes(std::ostream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  if (!out) throw io_error("short write to container stream");
}
inline void get_bytes(std::istream& in, void* p, std::size_t n) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw io_error("unexpected end of container stream");
  }
}
inline void put_u32(std::ostream& out, std::uint32_t v) { put_bytes(out, &v, 4); }
inline void put_u64(std::ostream& out, std::uint64_t v) { put_bytes(out, &v, 8); }
inline void put_f64(std::ostream& out, double v) { put_bytes(out, &v, 8); }
inline std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v;
  get_bytes(in, &v, 4);
  return v;
}
inline std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v;
  get_bytes(in, &v, 8);
  return v;
}
inline double get_f64(std::istream& in) {
  double v;
  get_bytes(in, &v, 8);
  return v;
}
inline void put_matrix(std::ostream& out, const Matrix& m) {
  put_bytes(out, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}
inline Matrix get_matrix(std::istream& in, Eigen::Index rows,
                         Eigen::Index cols) {
  Matrix m(rows, cols);
  get_bytes(in, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  return m;
}
inline void put_vector(std::ostream& out, const Vector& v) {
  put_bytes(out, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}
inline Vector get_vector(std::istream& in, Eigen::Index n) {
  Vector v(n);
  get_bytes(in, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
  return v;
}
inline void check_magic(std::istream& in, const char expect[4],
                        const std::string& what) {
  char m[4];
  get_bytes(in, m, 4);
  if (std::memcmp(m, expect, 4) != 0) {
    throw io_error("not a " + what + " container (bad magic)");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Nodal field container ("PBGR"): grid geometry plus one float64 value per
// node, x fastest.

inline void write_grid_container(std::ostream& out, const GridSpec& g,
                                 const Array3& field) {
  if (field.nx() != g.n || field.ny() != g.n || field.nz() != g.n) {
    throw io_error("field dimensions do not match the grid");
  }
  detail::put_bytes(out, "PBGR", 4);
  detail::put_u32(out, 1);
  detail::put_u32(out, static_cast<std::uint32_t>(g.n));
  detail::put_f64(out, g.box_length);
  for (int d = 0; d < 3; ++d) detail::put_f64(out, g.center[d]);
  detail::put_bytes(out, field.data(), sizeof(double) * field.size());
}

inline std::pair<GridSpec, Array3> read_grid_container(std::istream& in) {
  detail::check_magic(in, "PBGR", "grid field");
  const std::uint32_t version = detail::get_u32(in);
  if (version != 1) {
    throw io_error("unsupported grid container version " +
                   std::to_string(version));
  }
  GridSpec g;
  g.n = detail::get_u32(in);
  g.box_length = detail::get_f64(in);
  for (int d = 0; d < 3; ++d) g.center[d] = detail::get_f64(in);
  g.validate();
  Array3 field(g.n, g.n, g.n);
  detail::get_bytes(in, field.data(), sizeof(double) * field.size());
  return {g, field};
}

inline void write_grid_container_file(const std::string& path,
                                      const GridSpec& g, const Array3& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  write_grid_container(out, g, field);
}

inline std::pair<GridSpec, Array3> read_grid_container_file(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  return read_grid_container(in);
}

// ---------------------------------------------------------------------------
// Reduced-model container ("PBRM"): the mu-independent online blocks, the
// sampled-entry closure metadata, the molecule and physical scales needed to
// evaluate boundary sums, and (optionally) the lifted bases.

struct RomBundle {
  GridSpec grid;
  double temperature = 298.15;
  double eps_solvent = 78.54;
  MoleculeModel molecule;
  TrainingSet train;
  ReducedBasis basis;  // V present only when saved with lift
  ReducedModel model;
  DeimModel deim;      // basis-dependent pieces present only with lift
  bool with_lift = true;
};

inline void write_rom_container(std::ostream& out, const RomBundle& b) {
  const Eigen::Index N = b.model.dim();
  const Eigen::Index r = static_cast<Eigen::Index>(b.model.deim_block.cols());
  const Eigen::Index rstar = b.deim.rstar();
  const std::uint64_t Nfull =
      b.with_lift ? static_cast<std::uint64_t>(b.basis.V.rows()) : 0;

  detail::put_bytes(out, "PBRM", 4);
  detail::put_u32(out, 1);
  detail::put_u32(out, static_cast<std::uint32_t>(b.grid.n));
  detail::put_f64(out, b.grid.box_length);
  for (int d = 0; d < 3; ++d) detail::put_f64(out, b.grid.center[d]);
  detail::put_f64(out, b.temperature);
  detail::put_f64(out, b.eps_solvent);
  detail::put_f64(out, b.model.d_lo);
  detail::put_f64(out, b.model.d_hi);
  detail::put_u64(out, Nfull);
  detail::put_u64(out, static_cast<std::uint64_t>(N));
  detail::put_u64(out, static_cast<std::uint64_t>(r));
  detail::put_u64(out, static_cast<std::uint64_t>(rstar));

  detail::put_u64(out, b.molecule.atoms.size());
  for (const Atom& a : b.molecule.atoms) {
    for (int d = 0; d < 3; ++d) detail::put_f64(out, a.position[d]);
    detail::put_f64(out, a.charge);
    detail::put_f64(out, a.radius);
  }
  detail::put_u64(out, b.train.samples.size());
  for (double mu : b.train.samples) detail::put_f64(out, mu);
  detail::put_u64(out, b.model.selected_mus.size());
  for (double mu : b.model.selected_mus) detail::put_f64(out, mu);

  detail::put_matrix(out, b.model.A1h);
  detail::put_matrix(out, b.model.A2h);
  detail::put_vector(out, b.model.rhoh);
  detail::put_matrix(out, b.model.deim_block);

  const auto& idx = b.deim.indices();
  for (Eigen::Index q = 0; q < rstar; ++q) {
    detail::put_u64(out, static_cast<std::uint64_t>(idx[static_cast<std::size_t>(q)]));
  }
  const auto& nodes = b.deim.sample_nodes();
  const auto& coeffs = b.deim.sample_coeffs();
  for (Eigen::Index q = 0; q < rstar; ++q) {
    const auto s = static_cast<std::size_t>(q);
    detail::put_u64(out, nodes[s].size());
    for (std::size_t t = 0; t < nodes[s].size(); ++t) {
      for (int d = 0; d < 3; ++d) detail::put_f64(out, nodes[s][t][d]);
      detail::put_f64(out, coeffs[s][t]);
    }
  }
  detail::put_u64(out, static_cast<std::uint64_t>(b.deim.singular_values().size()));
  detail::put_vector(out, b.deim.singular_values());

  const std::uint8_t lift = b.with_lift ? 1 : 0;
  detail::put_bytes(out, &lift, 1);
  if (lift) {
    detail::put_matrix(out, b.basis.V);
    detail::put_matrix(out, b.deim.basis().leftCols(rstar));
  }
}

inline RomBundle read_rom_container(std::istream& in) {
  detail::check_magic(in, "PBRM", "reduced model");
  const std::uint32_t version = detail::get_u32(in);
  if (version != 1) {
    throw io_error("unsupported reduced-model container version " +
                   std::to_string(version));
  }
  RomBundle b;
  b.grid.n = detail::get_u32(in);
  b.grid.box_length = detail::get_f64(in);
  for (int d = 0; d < 3; ++d) b.grid.center[d] = detail::get_f64(in);
  b.grid.validate();
  b.temperature = detail::get_f64(in);
  b.eps_solvent = detail::get_f64(in);
  b.model.d_lo = detail::get_f64(in);
  b.model.d_hi = detail::get_f64(in);
  const auto Nfull = static_cast<Eigen::Index>(detail::get_u64(in));
  const auto N = static_cast<Eigen::Index>(detail::get_u64(in));
  const auto r = static_cast<Eigen::Index>(detail::get_u64(in));
  const auto rstar = static_cast<Eigen::Index>(detail::get_u64(in));

  const std::uint64_t natoms = detail::get_u64(in);
  b.molecule.atoms.resize(natoms);
  for (Atom& a : b.molecule.atoms) {
    for (int d = 0; d < 3; ++d) a.position[d] = detail::get_f64(in);
    a.charge = detail::get_f64(in);
    a.radius = detail::get_f64(in);
  }
  const std::uint64_t l = detail::get_u64(in);
  b.train.samples.resize(l);
  for (double& mu : b.train.samples) mu = detail::get_f64(in);
  b.train.lo = b.model.d_lo;
  b.train.hi = b.model.d_hi;
  const std::uint64_t nsel = detail::get_u64(in);
  b.model.selected_mus.resize(nsel);
  for (double& mu : b.model.selected_mus) mu = detail::get_f64(in);
  b.basis.selected_mus = b.model.selected_mus;

  b.model.A1h = detail::get_matrix(in, N, N);
  b.model.A2h = detail::get_matrix(in, N, N);
  b.model.rhoh = detail::get_vector(in, N);
  b.model.deim_block = detail::get_matrix(in, N, r);

  DeimParts parts;
  parts.r = r;
  parts.rstar = rstar;
  parts.indices.resize(static_cast<std::size_t>(rstar));
  for (auto& ix : parts.indices) {
    ix = static_cast<Eigen::Index>(detail::get_u64(in));
  }
  parts.sample_nodes.resize(static_cast<std::size_t>(rstar));
  parts.sample_coeffs.resize(static_cast<std::size_t>(rstar));
  for (std::size_t q = 0; q < static_cast<std::size_t>(rstar); ++q) {
    const std::uint64_t cnt = detail::get_u64(in);
    parts.sample_nodes[q].resize(cnt);
    parts.sample_coeffs[q].resize(cnt);
    for (std::size_t t = 0; t < cnt; ++t) {
      for (int d = 0; d < 3; ++d) {
        parts.sample_nodes[q][t][d] = detail::get_f64(in);
      }
      parts.sample_coeffs[q][t] = detail::get_f64(in);
    }
  }
  const auto sigma_count = static_cast<Eigen::Index>(detail::get_u64(in));
  parts.sigma = detail::get_vector(in, sigma_count);

  std::uint8_t lift = 0;
  detail::get_bytes(in, &lift, 1);
  b.with_lift = lift != 0;
  if (b.with_lift) {
    b.basis.V = detail::get_matrix(in, Nfull, N);
    parts.U = detail::get_matrix(in, Nfull, rstar);
  }
  b.deim = DeimModel(std::move(parts));
  return b;
}

inline void write_rom_container_file(const std::string& path,
                                     const RomBundle& b) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  write_rom_container(out, b);
}

inline RomBundle read_rom_container_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  return read_rom_container(in);
}

// ---------------------------------------------------------------------------
// CSV emitters.

inline void write_history_csv(std::ostream& out,
                              const std::vector<GreedyHistoryRow>& rows) {
  out << "iteration,mu_star,delta_max,true_err_max\n" << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.iteration << ',' << r.mu_star << ',' << r.delta_max << ',';
    if (std::isfinite(r.true_err_max)) out << r.true_err_max;
    out << '\n';
  }
  if (!out) throw io_error("short write while emitting history CSV");
}

inline void write_singular_values_csv(std::ostream& out, const Vector& sigma) {
  out << "index,sigma\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    out << (i + 1) << ',' << sigma[i] << '\n';
  }
  if (!out) throw io_error("short write while emitting singular-value CSV");
}

}  // namespace pbrom
