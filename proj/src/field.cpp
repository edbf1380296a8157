#include "nullflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nullflow {

ScalarField ScalarField::from_function(const SphereGrid& grid,
                                       const std::function<double(double, double)>& f) {
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.n_theta(); ++i)
    for (std::size_t j = 0; j < grid.n_phi(); ++j)
      out.at(i, j) = f(grid.theta(i), grid.phi(j));
  return out;
}

double ScalarField::min() const { return *std::min_element(data_.begin(), data_.end()); }
double ScalarField::max() const { return *std::max_element(data_.begin(), data_.end()); }

MetricField::MetricField(SymTensor2Field g) : g_(std::move(g)), inv_(g_.grid()) {
  std::size_t n = g_.grid().size();
  sqrt_det_.resize(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    double tt = g_.tt(idx), tp = g_.tp(idx), pp = g_.pp(idx);
    double det = tt * pp - tp * tp;
    if (!(tt > 0.0) || !(det > kMetricDetFloor)) {
      throw DefinitenessError("metric not positive definite at node " + std::to_string(idx) +
                              " (g_tt = " + std::to_string(tt) +
                              ", det = " + std::to_string(det) + ")");
    }
    inv_.tt(idx) = pp / det;
    inv_.tp(idx) = -tp / det;
    inv_.pp(idx) = tt / det;
    sqrt_det_[idx] = std::sqrt(det);
  }
}

MetricField MetricField::round_scaled(const SphereGrid& grid,
                                      const std::function<double(std::size_t)>& radius) {
  SymTensor2Field g(grid);
  for (std::size_t i = 0; i < grid.n_theta(); ++i) {
    double s = std::sin(grid.theta(i));
    for (std::size_t j = 0; j < grid.n_phi(); ++j) {
      std::size_t idx = grid.index(i, j);
      double r2 = radius(idx) * radius(idx);
      g.tt(idx) = r2;
      g.tp(idx) = 0.0;
      g.pp(idx) = r2 * s * s;
    }
  }
  return MetricField(std::move(g));
}

MetricField MetricField::round_unit(const SphereGrid& grid) {
  return round_scaled(grid, [](std::size_t) { return 1.0; });
}

void require_same_grid(const SphereGrid& a, const SphereGrid& b, const char* op) {
  if (a != b)
    throw ShapeError(std::string(op) + ": operands live on different grids (" + to_string(a.mode()) +
                     " " + std::to_string(a.n_theta()) + "x" + std::to_string(a.n_phi()) + " vs " +
                     to_string(b.mode()) + " " + std::to_string(b.n_theta()) + "x" +
                     std::to_string(b.n_phi()) + ")");
}

}  // namespace nullflow
