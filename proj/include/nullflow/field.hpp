#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "nullflow/errors.hpp"
#include "nullflow/grid.hpp"

namespace nullflow {

/// Determinant floor below which a metric is rejected as degenerate.
inline constexpr double kMetricDetFloor = 1e-14;

/// Scalar sample per lattice node.
class ScalarField {
public:
  explicit ScalarField(const SphereGrid& grid, double fill = 0.0)
      : grid_(grid), data_(grid.size(), fill) {}

  static ScalarField from_function(const SphereGrid& grid,
                                   const std::function<double(double, double)>& f);

  const SphereGrid& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }

  double& operator[](std::size_t idx) { return data_[idx]; }
  double operator[](std::size_t idx) const { return data_[idx]; }
  double& at(std::size_t i, std::size_t j) { return data_[grid_.index(i, j)]; }
  double at(std::size_t i, std::size_t j) const { return data_[grid_.index(i, j)]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double min() const;
  double max() const;

private:
  SphereGrid grid_;
  std::vector<double> data_;
};

/// Covector components (v_theta, v_phi) per node, in the coordinate coframe.
class CovectorField {
public:
  explicit CovectorField(const SphereGrid& grid) : grid_(grid), comp_{} {
    comp_[0].assign(grid.size(), 0.0);
    comp_[1].assign(grid.size(), 0.0);
  }

  const SphereGrid& grid() const { return grid_; }

  double& t(std::size_t idx) { return comp_[0][idx]; }
  double t(std::size_t idx) const { return comp_[0][idx]; }
  double& p(std::size_t idx) { return comp_[1][idx]; }
  double p(std::size_t idx) const { return comp_[1][idx]; }

  std::vector<double>& component(int k) { return comp_[k]; }
  const std::vector<double>& component(int k) const { return comp_[k]; }

private:
  SphereGrid grid_;
  std::array<std::vector<double>, 2> comp_;
};

/// Symmetric rank-2 covariant tensor with components (tt, tp, pp) per node.
class SymTensor2Field {
public:
  explicit SymTensor2Field(const SphereGrid& grid) : grid_(grid), comp_{} {
    comp_[0].assign(grid.size(), 0.0);
    comp_[1].assign(grid.size(), 0.0);
    comp_[2].assign(grid.size(), 0.0);
  }

  const SphereGrid& grid() const { return grid_; }

  double& tt(std::size_t idx) { return comp_[0][idx]; }
  double tt(std::size_t idx) const { return comp_[0][idx]; }
  double& tp(std::size_t idx) { return comp_[1][idx]; }
  double tp(std::size_t idx) const { return comp_[1][idx]; }
  double& pp(std::size_t idx) { return comp_[2][idx]; }
  double pp(std::size_t idx) const { return comp_[2][idx]; }

  std::vector<double>& component(int k) { return comp_[k]; }
  const std::vector<double>& component(int k) const { return comp_[k]; }

private:
  SphereGrid grid_;
  std::array<std::vector<double>, 2 + 1> comp_;
};

/// Positive definite metric on the lattice with cached inverse and area element.
///
/// Validation: g_tt > 0 and det g > kMetricDetFloor at every node.
class MetricField {
public:
  explicit MetricField(SymTensor2Field g);

  /// r^2 * (round unit-sphere metric), r supplied per node.
  static MetricField round_scaled(const SphereGrid& grid,
                                  const std::function<double(std::size_t)>& radius);
  static MetricField round_unit(const SphereGrid& grid);

  const SphereGrid& grid() const { return g_.grid(); }
  const SymTensor2Field& lower() const { return g_; }

  double tt(std::size_t idx) const { return g_.tt(idx); }
  double tp(std::size_t idx) const { return g_.tp(idx); }
  double pp(std::size_t idx) const { return g_.pp(idx); }

  double inv_tt(std::size_t idx) const { return inv_.tt(idx); }
  double inv_tp(std::size_t idx) const { return inv_.tp(idx); }
  double inv_pp(std::size_t idx) const { return inv_.pp(idx); }

  /// sqrt(det g), the area element.
  double sqrt_det(std::size_t idx) const { return sqrt_det_[idx]; }

private:
  SymTensor2Field g_;
  SymTensor2Field inv_;
  std::vector<double> sqrt_det_;
};

void require_same_grid(const SphereGrid& a, const SphereGrid& b, const char* op);

}  // namespace nullflow
