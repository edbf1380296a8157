#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nullflow/background.hpp"
#include "nullflow/field.hpp"
#include "nullflow/flow.hpp"
#include "nullflow/grid.hpp"
#include "nullflow/numerics.hpp"

namespace nullflow {

/// Trapezoid subdivisions used for every convolution over the bump support
/// [-eps, eps]: spacing eps/80. The even profile makes the rule converge
/// faster than any power, so this already reproduces the mass to ~1e-12.
inline constexpr std::size_t kGlueSubdivisions = 160;

/// Compactly supported smoothing kernel
///   bump(x) = C exp(1/(x^2 - 1)) on |x| < 1, zero outside,
/// with C fixed so the mass is one, and its width-eps rescaling
///   eta(x) = bump(x/eps)/eps.
struct MollifierSpec {
  double epsilon = 0.0;        ///< half-width of the scaled kernel
  double normalization = 0.0;  ///< C

  /// Computes C by doubling a trapezoid rule until two refinements agree to
  /// 1e-12. DomainError unless epsilon > 0.
  static MollifierSpec make(double epsilon);

  double bump(double x) const;        ///< normalized unit-width profile
  double bump_deriv(double x) const;  ///< bump(x) * (-2x) / (x^2 - 1)^2
  double eta(double x) const;         ///< bump(x/epsilon)/epsilon
  double eta_deriv(double x) const;   ///< bump_deriv(x/epsilon)/epsilon^2

  /// Mass of eta under the glue's own trapezoid rule; the invariant
  /// |quadrature_mass() - 1| <= 1e-10 is what downstream checks assert.
  double quadrature_mass(std::size_t subdivisions = kGlueSubdivisions) const;
};

/// Three smooth weights splitting the line around the junction level:
///   zeta1 = 1 below level - collar,       0 above level - collar/2,
///   zeta3 = its mirror image (1 above level + collar, 0 below + collar/2),
///   zeta2 = 1 - zeta1 - zeta3  (so it is 1 on |lambda - level| <= collar/2
///           and 0 outside |lambda - level| < collar).
/// The sum is one identically and each weight stays in [0, 1].
struct PartitionOfUnity {
  double level = 0.0;
  double collar = 0.0;

  double zeta1(double lambda) const;
  double zeta2(double lambda) const;
  double zeta3(double lambda) const;
  double dzeta1(double lambda) const;
  double dzeta2(double lambda) const;
  double dzeta3(double lambda) const;
};

/// A one-parameter family of cross-section graphs labelled by sigma >= 0,
/// innermost leaf first: leaf values, the graph expansion on each leaf, and
/// the analytic label-derivative of the family.
struct FoliationAtlas {
  SphereGrid grid = SphereGrid::axisymmetric(4);
  UniformAxis sigma;        ///< leaf labels, sigma = 0 on the innermost leaf
  double lambda_min = 0.0;  ///< coordinate label of the sigma = 0 leaf
  double level = 0.0;       ///< junction coordinate between flow and table
  double collar = 0.0;      ///< blending half-width
  double epsilon = 0.0;     ///< mollification half-width

  std::vector<ScalarField> leaf;    ///< graph per label
  std::vector<ScalarField> trchi;   ///< tr chi of each leaf (twice expansion_of)
  std::vector<ScalarField> dsigma;  ///< analytic d(leaf)/d(sigma)
};

/// Joins the flow's leaf history to the coordinate foliation above the
/// junction level. With lambda the leaf label, the raw family is
///   v(lambda, z) = history at time (level - lambda)   for lambda < level,
///                  lambda                             for lambda >= level,
/// which is continuous but has a kink at the junction. Each node's profile
/// is convolved in lambda with the mass-one kernel of half-width epsilon,
/// and the three-part blend
///   leaf = zeta1 * v  +  zeta2 * (smoothed v)  +  zeta3 * lambda
/// keeps the family exactly equal to its raw pieces outside the collar while
/// smoothing the junction inside it. Labels are shifted so sigma = 0 names
/// the innermost leaf (deepest flow time); leaves are emitted every
/// sigma_spacing up to the top of the background table.
///
/// Preconditions enforced: the history starts at time zero on the uniform
/// level graph, covers at least collar + epsilon of flow time, carries
/// expansion frames, and is sampled at least as finely as epsilon
/// (ResolutionError otherwise); epsilon < collar/2 (DomainError otherwise).
FoliationAtlas mollify_glue(const FlowHistory& history, const BackgroundFoliation& bg,
                            double level, double collar, double epsilon,
                            double sigma_spacing = 0.05);

enum class FoliationCheck {
  Monotonicity,  ///< d(leaf)/d(sigma) must be strictly positive
  Untrapped,     ///< tr chi of the leaf must be strictly positive
};

struct FoliationWitness {
  std::size_t leaf = 0;
  std::size_t node = 0;
  double value = 0.0;
  FoliationCheck check = FoliationCheck::Monotonicity;
};

struct FoliationReport {
  bool verified = false;
  double min_dsigma = 0.0;  ///< over every (leaf, node)
  double min_trchi = 0.0;   ///< over every (leaf, node), recomputed from bg
  std::vector<FoliationWitness> witnesses;
};

/// Checks that the atlas is a strictly nested family of strictly untrapped
/// graphs: d(leaf)/d(sigma) > 0 from the stored derivative and tr chi > 0
/// recomputed against the background at every (leaf, node). Any entry at or
/// below zero becomes a witness and the atlas is not verified.
FoliationReport verify_foliation(const FoliationAtlas& atlas, const BackgroundFoliation& bg);

/// One row per leaf: sigma, min/max leaf value, min tr chi, min d/dsigma,
/// as tab-separated text.
void write_atlas_summary(const FoliationAtlas& atlas, const std::string& path);

}  // namespace nullflow
