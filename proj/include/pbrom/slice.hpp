#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include "pbrom/array3.hpp"
#include "pbrom/errors.hpp"
#include "pbrom/grid.hpp"

namespace pbrom {

// Writes one axis-normal plane of a nodal field as CSV with header
// "x,y,value": the two in-plane coordinates in grid order (first-named axis
// fastest), then the nodal value.
inline void write_slice_csv(std::ostream& out, const Array3& field,
                            const GridSpec& g, int axis, std::size_t index) {
  if (axis < 0 || axis > 2) throw io_error("slice axis must be 0, 1 or 2");
  if (index >= g.n) throw io_error("slice index out of range");
  if (field.nx() != g.n || field.ny() != g.n || field.nz() != g.n) {
    throw io_error("field dimensions do not match the grid");
  }
  const int a1 = (axis == 0) ? 1 : 0;           // first in-plane axis
  const int a2 = (axis == 2) ? 1 : 2;           // second in-plane axis
  out << "x,y,value\n" << std::setprecision(17);
  for (std::size_t q2 = 0; q2 < g.n; ++q2) {
    for (std::size_t q1 = 0; q1 < g.n; ++q1) {
      std::size_t ijk[3];
      ijk[axis] = index;
      ijk[a1] = q1;
      ijk[a2] = q2;
      out << g.coord(q1, a1) << ',' << g.coord(q2, a2) << ','
          << field(ijk[0], ijk[1], ijk[2]) << '\n';
    }
  }
  if (!out) throw io_error("short write while emitting slice CSV");
}

inline void write_slice_csv_file(const std::string& path, const Array3& field,
                                 const GridSpec& g, int axis,
                                 std::size_t index) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  write_slice_csv(out, field, g, axis, index);
}

}  // namespace pbrom
