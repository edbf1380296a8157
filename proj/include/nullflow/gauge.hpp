#pragma once

#include <cstddef>
#include <vector>

#include "nullflow/background.hpp"
#include "nullflow/field.hpp"
#include "nullflow/grid.hpp"
#include "nullflow/numerics.hpp"

namespace nullflow {

/// A generator rescaling k -> a k on an affine background, tabulated per
/// slice and node on the background's coordinate axis. Carries the rescaling
/// factor with its first two coordinate derivatives, the induced inaffinity,
/// the velocity profile the construction integrates, and the cumulative
/// rescaled parameter s (ds = dl / a, s = 0 on the base slice).
struct GaugeProfile {
  SphereGrid grid = SphereGrid::axisymmetric(4);
  UniformAxis lambda;
  double v0 = 0.5;

  std::vector<ScalarField> a;
  std::vector<ScalarField> a_prime;
  std::vector<ScalarField> a_dprime;
  std::vector<ScalarField> kappa;  ///< inaffinity of the rescaled generator (= a_prime here)
  std::vector<ScalarField> v;
  std::vector<ScalarField> s;

  /// The trivial profile a = 1 (identity rescaling, s = lambda - lambda0).
  static GaugeProfile affine(const BackgroundFoliation& bg);
};

/// Builds the rescaling from the background expansion: with beta = trchibar/2
/// and B its cumulative integral, the velocity profile is
///   v = (v0 + (1 - v0) B) / (1 + (1 - v0) B),
/// the factor a = exp(integral of beta / v), and the induced inaffinity
/// kappa = a beta / v. Requires an affine background, v0 in (0, 1), and
/// strictly positive expansion on the base slice (NotANullConeError).
GaugeProfile construct_gauge(const BackgroundFoliation& bg, double v0);

/// Outcome of a pointwise inequality check over the whole table.
struct SlackReport {
  std::vector<double> coord;            ///< slice coordinates
  std::vector<double> min_slack_slice;  ///< per-slice minimum of the slack
  double min_slack = 0.0;               ///< overall minimum
  double tolerance = 0.0;               ///< pass iff min_slack >= -tolerance
  bool pass = false;
};

/// Checks that the rescaled generator keeps a nonnegative focusing budget:
///   a^2 G - a (2 a'' - a' trK - a trK') - |a trK - 4 a'| a |hK|
///     - 2 a^2 |abar| - (5/2) a^2 |hK|^2  >=  -tolerance
/// at every node, with trK' supplied by the transport identity
/// trK' = -trK^2/2 - |hK|^2 - G so that no finite-difference order is lost.
SlackReport check_gauge_condition(const BackgroundFoliation& bg, const GaugeProfile& gauge,
                                  double tolerance = 1e-8);

/// Checks the matter-side inequality on the raw affine data:
///   G - (5/2) |hK|^2 - 2 trK |hK| - 2 |abar|  >=  -tolerance.
SlackReport check_energy_condition(const BackgroundFoliation& bg, double tolerance = 0.0);

/// Rebuilds the background on a uniform grid of the rescaled parameter s,
/// rescaling every stored field to the new generator normalization:
///   trchibar -> a trchibar, hchibar -> a hchibar, abar -> a^2 abar,
///   g_ll -> a^2 g_ll, kappa -> a', trchi -> trchi / a, hchi -> hchi / a,
/// with gamma and tau unchanged. The rescaling must be tangentially uniform
/// (relative spread <= 1e-10 per slice) so that the stored cross-sections
/// remain cross-sections of the new parametrization; otherwise
/// ReparametrizationError. n_out = 0 keeps the input slice count.
BackgroundFoliation reparametrize(const BackgroundFoliation& bg, const GaugeProfile& gauge,
                                  std::size_t n_out = 0);

}  // namespace nullflow
