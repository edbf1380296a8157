#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nullflow/field.hpp"
#include "nullflow/grid.hpp"
#include "nullflow/numerics.hpp"

namespace nullflow {

/// Geometric data of a null hypersurface, sampled on cross-section slices at
/// uniform values of the flow coordinate. Slice tensors are components in the
/// lattice chart; k-side quantities refer to the generator, L-side quantities
/// to its null partner normalized against it.
struct BackgroundFoliation {
  SphereGrid grid = SphereGrid::axisymmetric(4);
  UniformAxis coord;    ///< flow coordinate samples (base slice first)
  bool affine = true;   ///< generator inaffinity vanishes identically
  bool has_l_side = false;   ///< trchi/tau are populated
  bool has_l_shear = false;  ///< hchi populated: full L-side tensor available

  std::vector<MetricField> gamma;        ///< induced metric per slice
  std::vector<ScalarField> trchi;        ///< L-side expansion
  std::vector<CovectorField> tau;        ///< torsion, slice components
  std::vector<ScalarField> trchibar;     ///< generator-side expansion
  std::vector<SymTensor2Field> hchibar;  ///< generator-side traceless shear
  std::vector<ScalarField> kappa;        ///< generator inaffinity
  std::vector<ScalarField> g_ll;         ///< Ricci contraction on the generator, twice
  std::vector<SymTensor2Field> abar_hat; ///< generator-side curvature source
  std::vector<SymTensor2Field> hchi;     ///< L-side traceless shear (may be empty)

  std::size_t n_slices() const { return coord.n; }
  double s_min() const { return coord.x0; }
  double s_max() const { return coord.back(); }

  /// Largest coordinate value whose slice has min trchi <= 0, located on the
  /// cubic interpolant of the per-slice minimum; s_min when no slice is
  /// weakly trapped. Requires the L side.
  double trapped_level() const;

  /// Shape, definiteness and shear-trace checks; throws on violation.
  void validate() const;
};

/// Analytic models for build_analytic. Cones use the area radius as the flow
/// coordinate, r = r0 + lambda, so slice data is closed form:
///   Minkowski:     trchi = trchibar = 2/r
///   Schwarzschild: trchi = (2/r)(1 - 2m/r), trchibar = 2/r
/// with torsion and inaffinity zero, round metric of radius r, and vanishing
/// shear and curvature sources. ShearFreeCustom builds a synthetic affine
/// geometry from an initial expansion profile and a constant curvature source
/// (generator side only; no L-side data).
struct MinkowskiCone {
  double r0 = 1.0;
};
struct SchwarzschildCone {
  double mass = 1.0;
  double r0 = 1.0;
};
struct ShearFreeCustom {
  std::function<double(double, double)> trk0;  ///< initial expansion (theta, phi)
  double g_kk = 0.0;                           ///< constant curvature source >= 0
};
using AnalyticBackground = std::variant<MinkowskiCone, SchwarzschildCone, ShearFreeCustom>;

/// Instantiates closed-form slice data on the lattice.
/// extent > 0 is the coordinate span; n_slices >= 4 the sample count.
BackgroundFoliation build_analytic(const AnalyticBackground& model, const SphereGrid& grid,
                                   double extent, std::size_t n_slices);

/// Background data interpolated onto the graph of omega (per node, along rays).
struct SliceSample {
  MetricField gamma;
  ScalarField trchi;
  CovectorField tau;
  ScalarField trchibar;
  SymTensor2Field hchibar;
  ScalarField kappa;
  ScalarField g_ll;
  SymTensor2Field abar_hat;
  std::optional<SymTensor2Field> hchi;
};

/// Interpolates every field at (omega(z), z). Cubic windows in the coordinate
/// (linear on request); nodes outside [s_min, s_max] raise ExitedDomainError
/// with the offending node set.
SliceSample sample_at(const BackgroundFoliation& bg, const ScalarField& omega,
                      Interp interp = Interp::Cubic);

/// Per-node scalar interpolation of one stored profile (helper for monitors).
ScalarField sample_scalar_at(const BackgroundFoliation& bg,
                             const std::vector<ScalarField>& profile,
                             const ScalarField& omega, Interp interp = Interp::Cubic);

/// Initial data and ray-wise sources for transport along the generator.
struct RayInitial {
  MetricField gamma0;
  ScalarField trchibar0;
  SymTensor2Field hchibar0;  ///< must be traceless against gamma0
};

struct RaySources {
  /// Each callable receives (lambda, node index); empty means identically zero.
  std::function<double(double, std::size_t)> kappa;
  std::function<double(double, std::size_t)> g_kk;
  /// Traceless curvature source components (tt, tp, pp).
  std::function<void(double, std::size_t, double*)> abar_hat;
};

/// Propagates (gamma, trchibar, hchibar) along each ray independently with a
/// fourth-order one-step method:
///   d/dl gamma    = 2 (hchibar + trchibar/2 gamma)
///   d/dl hchibar  = -abar_hat + |hchibar|^2 gamma + kappa hchibar
///   d/dl trchibar = -trchibar^2/2 - |hchibar|^2 - g_kk + kappa trchibar,
/// projecting hchibar back to traceless after every step. Transport blow-up
/// (|trchibar| >= 1e6 or area element collapse) raises FocalPointError with
/// the last completed coordinate value. Output carries no L-side data.
BackgroundFoliation raychaudhuri_propagate(const RayInitial& initial, const RaySources& sources,
                                           const UniformAxis& axis);

/// Tabulated input/output: per-slice blocks of named fields under a header
/// that fixes the lattice, the coordinate axis and the capability flags.
void write_background(const BackgroundFoliation& bg, const std::string& path);
BackgroundFoliation read_background(const std::string& path);

}  // namespace nullflow
