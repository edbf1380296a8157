#include "nullflow/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "nullflow/errors.hpp"

namespace nullflow {

namespace {

double raw_bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(1.0 / (x * x - 1.0));
}

// Trapezoid rule for the unit-width profile over its support.
double raw_bump_trapezoid(std::size_t subdivisions) {
  const double h = 2.0 / static_cast<double>(subdivisions);
  double sum = 0.0;
  for (std::size_t k = 0; k <= subdivisions; ++k) {
    const double x = -1.0 + h * static_cast<double>(k);
    const double w = (k == 0 || k == subdivisions) ? 0.5 * h : h;
    sum += w * raw_bump(x);
  }
  return sum;
}

}  // namespace

MollifierSpec MollifierSpec::make(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw DomainError("mollifier width must be positive");
  }
  std::size_t n = 16;
  double previous = raw_bump_trapezoid(n);
  double current = previous;
  do {
    previous = current;
    n *= 2;
    current = raw_bump_trapezoid(n);
  } while (std::abs(current - previous) >= 1e-12);
  return MollifierSpec{epsilon, 1.0 / current};
}

double MollifierSpec::bump(double x) const { return normalization * raw_bump(x); }

double MollifierSpec::bump_deriv(double x) const {
  if (std::abs(x) >= 1.0) return 0.0;
  const double d = x * x - 1.0;
  return bump(x) * (-2.0 * x) / (d * d);
}

double MollifierSpec::eta(double x) const { return bump(x / epsilon) / epsilon; }

double MollifierSpec::eta_deriv(double x) const {
  return bump_deriv(x / epsilon) / (epsilon * epsilon);
}

double MollifierSpec::quadrature_mass(std::size_t subdivisions) const {
  return normalization * raw_bump_trapezoid(subdivisions);
}

double PartitionOfUnity::zeta1(double lambda) const {
  return 1.0 - smooth_step((lambda - (level - collar)) / (0.5 * collar));
}

double PartitionOfUnity::zeta3(double lambda) const {
  return zeta1(2.0 * level - lambda);
}

double PartitionOfUnity::zeta2(double lambda) const {
  return 1.0 - zeta1(lambda) - zeta3(lambda);
}

double PartitionOfUnity::dzeta1(double lambda) const {
  return -smooth_step_deriv((lambda - (level - collar)) / (0.5 * collar)) /
         (0.5 * collar);
}

double PartitionOfUnity::dzeta3(double lambda) const {
  return -dzeta1(2.0 * level - lambda);
}

double PartitionOfUnity::dzeta2(double lambda) const {
  return -dzeta1(lambda) - dzeta3(lambda);
}

FoliationAtlas mollify_glue(const FlowHistory& history, const BackgroundFoliation& bg,
                            double level, double collar, double epsilon,
                            double sigma_spacing) {
  if (!(collar > 0.0) || !(epsilon > 0.0) || !(sigma_spacing > 0.0) ||
      !std::isfinite(level)) {
    throw DomainError("glue parameters must be positive and finite");
  }
  if (!(epsilon < 0.5 * collar)) {
    throw DomainError("mollification width must stay below half the collar "
                      "so the blend is exact outside it");
  }
  if (history.time.n < 4) {
    throw DomainError("flow history needs at least four frames to resample");
  }
  if (history.omega.size() != history.time.n ||
      history.expansion.size() != history.time.n) {
    throw ShapeError("flow history frame counts disagree with its time axis");
  }
  if (std::abs(history.time.x0) > 1e-12) {
    throw DomainError("flow history must start at time zero");
  }
  if (history.time.dx > epsilon) {
    throw ResolutionError("flow history frames are coarser than the "
                          "mollification width; rerun with a finer cadence");
  }
  const SphereGrid& grid = history.omega.front().grid();
  require_same_grid(grid, bg.grid, "glue");
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(history.omega.front()[i] - level) > 1e-9) {
      throw DomainError("flow history must start on the uniform graph at the "
                        "junction level");
    }
  }
  const double t_total = history.time.back();
  if (t_total < collar + epsilon) {
    throw DomainError("flow history is shorter than the blending collar");
  }

  const double lambda_min = level - t_total;
  const double lambda_max = bg.s_max();
  const std::size_t n_sigma = static_cast<std::size_t>(
      std::floor((lambda_max - lambda_min) / sigma_spacing * (1.0 + 1e-12))) + 1;
  if (n_sigma < 2) {
    throw DomainError("glue output would hold fewer than two leaves");
  }

  const PartitionOfUnity pou{level, collar};
  const MollifierSpec moll = MollifierSpec::make(epsilon);

  // Cubic resample of one frame family at flow time t (same weights per node).
  const auto resample = [&](const std::vector<ScalarField>& frames, double t,
                            std::size_t node) {
    const InterpStencil st = interp_stencil(history.time, t, Interp::Cubic);
    double value = 0.0;
    for (int j = 0; j < st.width; ++j) {
      value += st.w[j] * frames[st.k0 + j][node];
    }
    return value;
  };

  FoliationAtlas atlas;
  atlas.grid = grid;
  atlas.sigma = UniformAxis{0.0, sigma_spacing, n_sigma};
  atlas.lambda_min = lambda_min;
  atlas.level = level;
  atlas.collar = collar;
  atlas.epsilon = epsilon;
  atlas.leaf.reserve(n_sigma);
  atlas.trchi.reserve(n_sigma);
  atlas.dsigma.reserve(n_sigma);

  const double h = 2.0 * epsilon / static_cast<double>(kGlueSubdivisions);
  for (std::size_t s = 0; s < n_sigma; ++s) {
    const double lambda = lambda_min + sigma_spacing * static_cast<double>(s);
    const double z1 = pou.zeta1(lambda);
    const double z2 = pou.zeta2(lambda);
    const double z3 = pou.zeta3(lambda);
    const double dz1 = pou.dzeta1(lambda);
    const double dz2 = pou.dzeta2(lambda);
    const double dz3 = pou.dzeta3(lambda);

    ScalarField leaf(grid);
    ScalarField dleaf(grid);
    for (std::size_t i = 0; i < n; ++i) {
      double value = z3 * lambda;
      double deriv = dz3 * lambda + z3;
      if (z1 > 0.0) {
        const double t = level - lambda;
        const double w = resample(history.omega, t, i);
        // d/dlambda of (history at level - lambda) is +expansion there.
        const double e = resample(history.expansion, t, i);
        value += z1 * w;
        deriv += dz1 * w + z1 * e;
      }
      if (z2 > 0.0) {
        double smooth = 0.0;
        double dsmooth = 0.0;
        for (std::size_t k = 0; k <= kGlueSubdivisions; ++k) {
          const double u = lambda - epsilon + h * static_cast<double>(k);
          const double weight = (k == 0 || k == kGlueSubdivisions) ? 0.5 * h : h;
          const double x = lambda - u;
          const double raw = u >= level ? u : resample(history.omega, level - u, i);
          smooth += weight * moll.eta(x) * raw;
          dsmooth += weight * moll.eta_deriv(x) * raw;
        }
        value += z2 * smooth;
        deriv += dz2 * smooth + z2 * dsmooth;
      }
      leaf[i] = value;
      dleaf[i] = deriv;
    }

    ScalarField expansion = expansion_of(bg, leaf);
    ScalarField trchi(grid);
    for (std::size_t i = 0; i < n; ++i) trchi[i] = 2.0 * expansion[i];
    atlas.leaf.push_back(std::move(leaf));
    atlas.trchi.push_back(std::move(trchi));
    atlas.dsigma.push_back(std::move(dleaf));
  }
  return atlas;
}

FoliationReport verify_foliation(const FoliationAtlas& atlas,
                                 const BackgroundFoliation& bg) {
  if (atlas.leaf.size() != atlas.sigma.n || atlas.dsigma.size() != atlas.sigma.n) {
    throw ShapeError("atlas leaf counts disagree with its label axis");
  }
  FoliationReport report;
  report.min_dsigma = std::numeric_limits<double>::infinity();
  report.min_trchi = std::numeric_limits<double>::infinity();

  for (std::size_t s = 0; s < atlas.sigma.n; ++s) {
    const ScalarField& dsig = atlas.dsigma[s];
    ScalarField expansion = expansion_of(bg, atlas.leaf[s]);
    for (std::size_t i = 0; i < atlas.grid.size(); ++i) {
      const double m = dsig[i];
      const double x = 2.0 * expansion[i];
      report.min_dsigma = std::min(report.min_dsigma, m);
      report.min_trchi = std::min(report.min_trchi, x);
      if (!(m > 0.0)) {
        report.witnesses.push_back({s, i, m, FoliationCheck::Monotonicity});
      }
      if (!(x > 0.0)) {
        report.witnesses.push_back({s, i, x, FoliationCheck::Untrapped});
      }
    }
  }
  report.verified = report.witnesses.empty();
  return report;
}

void write_atlas_summary(const FoliationAtlas& atlas, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) {
    throw FormatError("cannot open atlas summary for writing: " + path);
  }
  std::fprintf(f, "sigma\tleaf_min\tleaf_max\ttrchi_min\tdsigma_min\n");
  for (std::size_t s = 0; s < atlas.sigma.n; ++s) {
    std::fprintf(f, "%s\t%s\t%s\t%s\t%s\n", format_double(atlas.sigma.at(s)).c_str(),
                 format_double(atlas.leaf[s].min()).c_str(),
                 format_double(atlas.leaf[s].max()).c_str(),
                 format_double(atlas.trchi[s].min()).c_str(),
                 format_double(atlas.dsigma[s].min()).c_str());
  }
  std::fclose(f);
}

}  // namespace nullflow
