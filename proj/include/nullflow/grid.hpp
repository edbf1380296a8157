#pragma once

#include <cstddef>
#include <string>

#include "nullflow/errors.hpp"

namespace nullflow {

enum class GridMode {
  Axisymmetric,  ///< n_phi = 1, tangential phi-derivatives vanish identically
  Full2D,        ///< full (theta, phi) lattice, n_phi even
};

std::string to_string(GridMode mode);
GridMode grid_mode_from_string(const std::string& s);

/// Equiangular lattice on the unit sphere parameter domain.
///
/// Nodes sit at theta_i = (i + 1/2) * pi / n_theta (half-cell offset from the
/// poles) and phi_j = j * 2 pi / n_phi. Row-major storage, index = i*n_phi + j.
/// In axisymmetric mode there is a single phi column of width 2 pi.
class SphereGrid {
public:
  SphereGrid(GridMode mode, std::size_t n_theta, std::size_t n_phi);

  static SphereGrid axisymmetric(std::size_t n_theta) {
    return SphereGrid(GridMode::Axisymmetric, n_theta, 1);
  }
  static SphereGrid full(std::size_t n_theta, std::size_t n_phi) {
    return SphereGrid(GridMode::Full2D, n_theta, n_phi);
  }

  GridMode mode() const { return mode_; }
  std::size_t n_theta() const { return n_theta_; }
  std::size_t n_phi() const { return n_phi_; }
  std::size_t size() const { return n_theta_ * n_phi_; }

  double h_theta() const { return h_theta_; }
  double h_phi() const { return h_phi_; }

  double theta(std::size_t i) const { return (static_cast<double>(i) + 0.5) * h_theta_; }
  double phi(std::size_t j) const { return static_cast<double>(j) * h_phi_; }

  std::size_t index(std::size_t i, std::size_t j) const { return i * n_phi_ + j; }
  std::size_t row(std::size_t idx) const { return idx / n_phi_; }
  std::size_t col(std::size_t idx) const { return idx % n_phi_; }

  /// Column reached by continuing a meridian across a pole.
  std::size_t across_pole(std::size_t j) const {
    return n_phi_ == 1 ? 0 : (j + n_phi_ / 2) % n_phi_;
  }

  std::size_t wrap_phi(std::ptrdiff_t j) const {
    std::ptrdiff_t n = static_cast<std::ptrdiff_t>(n_phi_);
    std::ptrdiff_t r = j % n;
    return static_cast<std::size_t>(r < 0 ? r + n : r);
  }

  bool operator==(const SphereGrid& o) const {
    return mode_ == o.mode_ && n_theta_ == o.n_theta_ && n_phi_ == o.n_phi_;
  }
  bool operator!=(const SphereGrid& o) const { return !(*this == o); }

private:
  GridMode mode_;
  std::size_t n_theta_;
  std::size_t n_phi_;
  double h_theta_;
  double h_phi_;
};

}  // namespace nullflow
