#include "nullflow/numerics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "nullflow/errors.hpp"

namespace nullflow {

InterpStencil interp_stencil(const UniformAxis& axis, double x, Interp kind) {
  InterpStencil s;
  if (axis.n < 2) throw DomainError("interp_stencil: axis needs at least two samples");
  double u = (x - axis.x0) / axis.dx;
  if (kind == Interp::Linear || axis.n < 4) {
    auto k = static_cast<std::ptrdiff_t>(std::floor(u));
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(axis.n) - 2);
    double t = u - static_cast<double>(k);
    s.k0 = static_cast<std::size_t>(k);
    s.width = 2;
    s.w[0] = 1.0 - t;
    s.w[1] = t;
    return s;
  }
  auto k = static_cast<std::ptrdiff_t>(std::floor(u)) - 1;
  k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(axis.n) - 4);
  double t = u - static_cast<double>(k);  // position relative to window start
  s.k0 = static_cast<std::size_t>(k);
  s.width = 4;
  s.w[0] = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  s.w[1] = t * (t - 2.0) * (t - 3.0) / 2.0;
  s.w[2] = -t * (t - 1.0) * (t - 3.0) / 2.0;
  s.w[3] = t * (t - 1.0) * (t - 2.0) / 6.0;
  return s;
}

std::vector<double> cumulative_integral(const std::vector<double>& y, double dx) {
  std::size_t n = y.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n < 4) {  // trapezoid fallback for very short axes
    for (std::size_t k = 1; k < n; ++k) out[k] = out[k - 1] + 0.5 * dx * (y[k - 1] + y[k]);
    return out;
  }
  // Integral over [x_k, x_k+1] of the cubic through the four samples nearest
  // the cell; closed Newton-Cotes style weights derived from the Lagrange
  // basis. Interior cells use samples k-1..k+2:
  //   dx * (-y[k-1] + 13 y[k] + 13 y[k+1] - y[k+2]) / 24.
  // End cells use the one-sided windows 0..3 and n-4..n-1.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double cell;
    if (k == 0) {
      cell = dx * (9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3]) / 24.0;
    } else if (k + 2 >= n) {
      cell = dx * (9.0 * y[n - 1] + 19.0 * y[n - 2] - 5.0 * y[n - 3] + y[n - 4]) / 24.0;
    } else {
      cell = dx * (-y[k - 1] + 13.0 * y[k] + 13.0 * y[k + 1] - y[k + 2]) / 24.0;
    }
    out[k + 1] = out[k] + cell;
  }
  return out;
}

double invert_monotone(const UniformAxis& axis, const std::vector<double>& y, double target) {
  if (y.size() != axis.n) throw ShapeError("invert_monotone: sample count mismatch");
  auto eval = [&](double x) {
    InterpStencil s = interp_stencil(axis, x);
    return apply_stencil(s, y);
  };
  double lo = axis.x0, hi = axis.back();
  if (target <= y.front()) return lo;
  if (target >= y.back()) return hi;
  // Bracket on the sample lattice first, then bisect the interpolant.
  std::size_t k = static_cast<std::size_t>(
      std::upper_bound(y.begin(), y.end(), target) - y.begin());
  lo = axis.at(k - 1);
  hi = axis.at(std::min(k, axis.n - 1));
  for (int it = 0; it < 80 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    double mid = 0.5 * (lo + hi);
    if (eval(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double a = std::exp(-1.0 / x);
  double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double smooth_step_deriv(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  double a = std::exp(-1.0 / x);
  double b = std::exp(-1.0 / (1.0 - x));
  double da = a / (x * x);
  double db = -b / ((1.0 - x) * (1.0 - x));
  double s = a + b;
  return (da * s - a * (da + db)) / (s * s);
}

void rk4_step(double x, double h, std::vector<double>& y,
              const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& f) {
  std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  f(x, y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  f(x + 0.5 * h, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  f(x + 0.5 * h, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  f(x + h, tmp, k4);
  for (std::size_t i = 0; i < n; ++i)
    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_double(double v) {
  // Shortest decimal form that parses back to the identical binary64 value.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace nullflow
