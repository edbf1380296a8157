#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nullflow {

/// Uniform 1-D sample grid x_k = x0 + k*dx, k = 0..n-1.
struct UniformAxis {
  double x0 = 0.0;
  double dx = 1.0;
  std::size_t n = 0;

  double back() const { return x0 + dx * static_cast<double>(n - 1); }
  double at(std::size_t k) const { return x0 + dx * static_cast<double>(k); }
  bool contains(double x, double slack = 0.0) const {
    return x >= x0 - slack && x <= back() + slack;
  }
};

enum class Interp { Cubic, Linear };

/// Four-point Lagrange weights (or two-point linear) for evaluating a sampled
/// function at x. Window start k0 is clamped to the axis; callers apply the
/// weights to samples k0..k0+3 (cubic) or k0..k0+1 (linear).
struct InterpStencil {
  std::size_t k0 = 0;
  int width = 4;
  double w[4] = {0, 0, 0, 0};
};

InterpStencil interp_stencil(const UniformAxis& axis, double x, Interp kind = Interp::Cubic);

inline double apply_stencil(const InterpStencil& s, const std::vector<double>& samples) {
  double acc = 0.0;
  for (int m = 0; m < s.width; ++m) acc += s.w[m] * samples[s.k0 + static_cast<std::size_t>(m)];
  return acc;
}

/// Cumulative integral of samples y_k on a uniform axis, fourth order:
/// each cell integral uses the cubic through the four nearest samples.
/// out[k] = integral from x_0 to x_k, out[0] = 0.
std::vector<double> cumulative_integral(const std::vector<double>& y, double dx);

/// Invert a strictly increasing sampled map y(x) on a uniform axis: returns x
/// with cubic-interpolated y(x) = target, by bisection to ~1e-14.
double invert_monotone(const UniformAxis& axis, const std::vector<double>& y, double target);

/// C-infinity step: 0 for x <= 0, 1 for x >= 1, built from exp(-1/x).
double smooth_step(double x);
/// Derivative of smooth_step.
double smooth_step_deriv(double x);

/// Classic fourth-order one-step integrator for y' = f(x, y) on vectors.
void rk4_step(double x, double h, std::vector<double>& y,
              const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& f);

/// FNV-1a 64-bit hash of a byte string (used for config fingerprints).
std::uint64_t fnv1a64(const std::string& bytes);

/// Shortest decimal that round-trips the double exactly.
std::string format_double(double v);

}  // namespace nullflow
