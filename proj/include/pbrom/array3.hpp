#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace pbrom {

// Dense 3-D array with x fastest, then y, then z.  Used for nodal fields and
// the half-grid dielectric samples; kept deliberately minimal.
class Array3 {
 public:
  Array3() = default;
  Array3(std::size_t nx, std::size_t ny, std::size_t nz, double fill = 0.0)
      : nx_(nx), ny_(ny), nz_(nz), data_(nx * ny * nz, fill) {}

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t nz() const { return nz_; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    assert(i < nx_ && j < ny_ && k < nz_);
    return (k * ny_ + j) * nx_ + i;
  }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[index(i, j, k)];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[index(i, j, k)];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

 private:
  std::size_t nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<double> data_;
};

}  // namespace pbrom
