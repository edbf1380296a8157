#include "nullflow/grid.hpp"

#include <numbers>

namespace nullflow {

std::string to_string(GridMode mode) {
  return mode == GridMode::Axisymmetric ? "axisymmetric" : "full";
}

GridMode grid_mode_from_string(const std::string& s) {
  if (s == "axisymmetric") return GridMode::Axisymmetric;
  if (s == "full") return GridMode::Full2D;
  throw DomainError("unknown grid mode '" + s + "' (expected 'axisymmetric' or 'full')");
}

SphereGrid::SphereGrid(GridMode mode, std::size_t n_theta, std::size_t n_phi)
    : mode_(mode), n_theta_(n_theta), n_phi_(n_phi) {
  if (n_theta_ < 4) throw DomainError("n_theta must be at least 4");
  if (mode_ == GridMode::Axisymmetric) {
    if (n_phi_ != 1) throw DomainError("axisymmetric mode requires n_phi = 1");
  } else {
    // Even n_phi so every meridian continues across the poles onto a grid column.
    if (n_phi_ < 4 || n_phi_ % 2 != 0)
      throw DomainError("full mode requires even n_phi >= 4");
  }
  h_theta_ = std::numbers::pi / static_cast<double>(n_theta_);
  h_phi_ = 2.0 * std::numbers::pi / static_cast<double>(n_phi_);
}

}  // namespace nullflow
