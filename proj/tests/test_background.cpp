#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "nullflow/background.hpp"
#include "nullflow/calculus.hpp"

using namespace nullflow;

namespace {

BackgroundFoliation minkowski(std::size_t n_theta = 32, double r0 = 1.0, double extent = 3.0,
                              std::size_t n_slices = 301) {
  return build_analytic(MinkowskiCone{r0}, SphereGrid::axisymmetric(n_theta), extent, n_slices);
}

BackgroundFoliation schwarzschild(std::size_t n_theta = 32, double mass = 1.0, double r0 = 1.0,
                                  double extent = 3.0, std::size_t n_slices = 301) {
  return build_analytic(SchwarzschildCone{mass, r0}, SphereGrid::axisymmetric(n_theta), extent,
                        n_slices);
}

}  // namespace

TEST_SUITE("background") {

TEST_CASE("flat cone tables carry the closed-form slice data") {
  BackgroundFoliation bg = minkowski();
  CHECK(bg.affine);
  CHECK(bg.has_l_side);
  CHECK(bg.has_l_shear);
  CHECK(bg.s_min() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bg.s_max() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_NOTHROW(bg.validate());
  // r = 2 is the lattice point k = 100.
  std::size_t k = 100;
  CHECK(bg.coord.at(k) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(bg.trchi[k][0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bg.trchibar[k][5] == doctest::Approx(1.0).epsilon(1e-14));
  double t3 = bg.grid.theta(3);
  CHECK(bg.gamma[k].pp(3) == doctest::Approx(4.0 * std::sin(t3) * std::sin(t3)).epsilon(1e-14));
  CHECK(bg.gamma[k].tt(3) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(bg.tau[k].t(3) == 0.0);
  CHECK(bg.kappa[k][3] == 0.0);
  CHECK(bg.g_ll[k][3] == 0.0);
}

TEST_CASE("black-hole cone: outgoing expansion vanishes on the horizon slice") {
  BackgroundFoliation bg = schwarzschild();
  CHECK(bg.trchi[100][0] == 0.0);  // r = 2, mass 1: exactly (2/r)(1 - 2m/r) = 0
  // r = 3 -> 2/9, r = 2.5 -> 0.16
  CHECK(bg.trchi[200][0] == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  CHECK(bg.trchi[150][0] == doctest::Approx(0.16).epsilon(1e-14));
  CHECK(bg.trchibar[150][0] == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("trapped level: root of the slice-minimum expansion") {
  BackgroundFoliation bg = schwarzschild();
  CHECK(bg.trapped_level() == doctest::Approx(2.0).epsilon(1e-9));
  BackgroundFoliation flat = minkowski();
  // Nowhere trapped: reports the inner edge.
  CHECK(flat.trapped_level() == doctest::Approx(flat.s_min()).epsilon(1e-15));
  BackgroundFoliation no_l = build_analytic(
      ShearFreeCustom{[](double, double) { return 2.0; }, 0.0},
      SphereGrid::axisymmetric(8), 1.0, 11);
  CHECK_THROWS_AS(no_l.trapped_level(), CapabilityError);
}

TEST_CASE("ray interpolation hits closed forms between lattice slices") {
  BackgroundFoliation bg = schwarzschild();
  ScalarField omega(bg.grid, 2.505);  // off-lattice
  SliceSample s = sample_at(bg, omega);
  double r = 2.505;
  CHECK(s.trchi[0] == doctest::Approx((2.0 / r) * (1.0 - 2.0 / r)).epsilon(1e-7));
  CHECK(s.trchibar[0] == doctest::Approx(2.0 / r).epsilon(1e-7));
  CHECK(s.gamma.tt(4) == doctest::Approx(r * r).epsilon(1e-7));
  CHECK(s.hchi.has_value());
  CHECK(s.hchi->tt(0) == 0.0);
  // Linear windows are available on request.
  SliceSample lin = sample_at(bg, omega, Interp::Linear);
  CHECK(lin.trchibar[0] == doctest::Approx(2.0 / r).epsilon(1e-5));
}

TEST_CASE("ray interpolation refuses nodes outside the table") {
  BackgroundFoliation bg = minkowski();
  ScalarField omega(bg.grid, 2.0);
  omega[3] = 4.5;
  omega[7] = 0.2;
  try {
    sample_at(bg, omega);
    FAIL("expected ExitedDomainError");
  } catch (const ExitedDomainError& e) {
    REQUIRE(e.nodes().size() == 2);
    CHECK(e.nodes()[0] == 3);
    CHECK(e.nodes()[1] == 7);
  }
}

TEST_CASE("synthetic shear-free family: vacuum decay and constant-source refocusing") {
  SphereGrid grid = SphereGrid::axisymmetric(8);
  // Vacuum: expansion 2 decays as 2/(1 + l), area element grows as (1 + l)^2.
  BackgroundFoliation vac = build_analytic(
      ShearFreeCustom{[](double, double) { return 2.0; }, 0.0}, grid, 2.0, 201);
  CHECK_FALSE(vac.has_l_side);
  std::size_t k = 100;  // l = 1
  CHECK(vac.trchibar[k][0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(vac.gamma[k].tt(0) == doctest::Approx(4.0).epsilon(1e-13));
  // Constant curvature source c: expansion sqrt(2c) tan(arctan(K0/sqrt(2c)) - sqrt(c/2) l).
  double c = 2.0;
  BackgroundFoliation foc = build_analytic(
      ShearFreeCustom{[](double, double) { return 2.0; }, c}, grid, 1.5, 151);
  for (std::size_t kk : {0UL, 50UL, 150UL}) {
    double lam = foc.coord.at(kk);
    double u = std::atan(1.0) - std::sqrt(0.5 * c) * lam;
    CHECK(foc.trchibar[kk][3] == doctest::Approx(2.0 * std::tan(u)).epsilon(1e-12));
    double f = std::cos(u) / std::cos(std::atan(1.0));
    CHECK(foc.gamma[kk].tt(3) == doctest::Approx(f * f).epsilon(1e-12));
  }
  CHECK(foc.g_ll[0][0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("synthetic family reports focusing before the requested extent") {
  SphereGrid grid = SphereGrid::axisymmetric(8);
  try {
    build_analytic(ShearFreeCustom{[](double, double) { return -2.0; }, 0.0}, grid, 2.0, 201);
    FAIL("expected FocalPointError");
  } catch (const FocalPointError& e) {
    CHECK(e.lambda_last() >= 0.9);
    CHECK(e.lambda_last() < 1.0);
  }
}

TEST_CASE("ray transport reproduces the flat-cone decay law") {
  SphereGrid grid = SphereGrid::axisymmetric(16);
  RayInitial init{MetricField::round_unit(grid), ScalarField(grid, 2.0), SymTensor2Field(grid)};
  UniformAxis axis{0.0, 1e-2, 301};
  BackgroundFoliation bg = raychaudhuri_propagate(init, RaySources{}, axis);
  CHECK(bg.affine);
  CHECK_FALSE(bg.has_l_side);
  double worst_k = 0.0, worst_g = 0.0;
  for (std::size_t k = 0; k < bg.n_slices(); ++k) {
    double lam = axis.at(k);
    worst_k = std::max(worst_k, std::abs(bg.trchibar[k][0] - 2.0 / (1.0 + lam)));
    double t = grid.theta(5);
    double gpp = (1.0 + lam) * (1.0 + lam) * std::sin(t) * std::sin(t);
    worst_g = std::max(worst_g, std::abs(bg.hchibar[k].tt(5)) + std::abs(bg.gamma[k].pp(5) - gpp));
  }
  CHECK(worst_k <= 1e-8);  // measured 9.0e-11
  CHECK(worst_g <= 3e-8);  // measured 1.6e-8 (area element grows 16x over the span)
}

TEST_CASE("transported inverse expansion grows at slope of at least one half") {
  SphereGrid grid = SphereGrid::axisymmetric(12);
  // Shear packet plus positive curvature source: focusing strictly faster
  // than vacuum, so d/dl (1/trchibar) >= 1/2 along every ray.
  RayInitial init{MetricField::round_unit(grid), ScalarField(grid, 2.0), SymTensor2Field(grid)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double t = grid.theta(grid.row(i));
    double a = 0.3 * std::sin(t);
    init.hchibar0.tt(i) = a;
    init.hchibar0.pp(i) = -a * std::sin(t) * std::sin(t);
  }
  RaySources src;
  src.g_kk = [](double lam, std::size_t) { return 0.4 / (1.0 + lam); };
  UniformAxis axis{0.0, 5e-3, 201};
  BackgroundFoliation bg = raychaudhuri_propagate(init, src, axis);
  CHECK_NOTHROW(bg.validate());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t k = 0; k + 1 < bg.n_slices(); ++k) {
      double slope = (1.0 / bg.trchibar[k + 1][i] - 1.0 / bg.trchibar[k][i]) / axis.dx;
      CHECK(slope >= 0.5 - 1e-6);
    }
  }
}

TEST_CASE("ray transport with an inaffine generator matches the rescaled closed form") {
  // With constant kappa the inverse expansion w = 1/K obeys the linear law
  // w' = 1/2 - kappa w, so for kappa = 1, K0 = 1:  K = 2 / (1 + e^{-l}).
  SphereGrid grid = SphereGrid::axisymmetric(8);
  RayInitial init{MetricField::round_unit(grid), ScalarField(grid, 1.0), SymTensor2Field(grid)};
  RaySources src;
  src.kappa = [](double, std::size_t) { return 1.0; };
  UniformAxis axis{0.0, 1e-3, 1001};
  BackgroundFoliation bg = raychaudhuri_propagate(init, src, axis);
  CHECK_FALSE(bg.affine);
  double worst = 0.0;
  for (std::size_t k = 0; k < bg.n_slices(); ++k) {
    double lam = axis.at(k);
    double K = 2.0 / (1.0 + std::exp(-lam));
    worst = std::max(worst, std::abs(bg.trchibar[k][0] - K));
  }
  CHECK(worst <= 1e-12);  // measured 2.0e-15
}

TEST_CASE("ray transport keeps a sourced shear traceless") {
  SphereGrid grid = SphereGrid::axisymmetric(12);
  RayInitial init{MetricField::round_unit(grid), ScalarField(grid, 2.5), SymTensor2Field(grid)};
  RaySources src;
  src.abar_hat = [&](double lam, std::size_t idx, double* out) {
    double t = grid.theta(grid.row(idx));
    out[0] = 0.2 * std::sin(t) * std::exp(-lam);
    out[1] = 0.0;
    out[2] = -0.2 * std::sin(t) * std::exp(-lam) * std::sin(t) * std::sin(t);
  };
  UniformAxis axis{0.0, 1e-2, 101};
  BackgroundFoliation bg = raychaudhuri_propagate(init, src, axis);
  CHECK_NOTHROW(bg.validate());
  bool shear_active = false;
  for (std::size_t i = 0; i < grid.size(); ++i)
    shear_active = shear_active || std::abs(bg.hchibar.back().tt(i)) > 1e-4;
  CHECK(shear_active);
}

TEST_CASE("ray transport reports the focal parameter on blow-up") {
  SphereGrid grid = SphereGrid::axisymmetric(8);
  RayInitial init{MetricField::round_unit(grid), ScalarField(grid, -2.0), SymTensor2Field(grid)};
  UniformAxis axis{0.0, 1e-2, 201};
  try {
    raychaudhuri_propagate(init, RaySources{}, axis);
    FAIL("expected FocalPointError");
  } catch (const FocalPointError& e) {
    CHECK(e.lambda_last() >= 0.9);
    CHECK(e.lambda_last() <= 1.0);
  }
}

TEST_CASE("ray transport rejects an initial shear with a trace") {
  SphereGrid grid = SphereGrid::axisymmetric(8);
  RayInitial init{MetricField::round_unit(grid), ScalarField(grid, 2.0), SymTensor2Field(grid)};
  for (std::size_t i = 0; i < grid.size(); ++i) init.hchibar0.tt(i) = 0.1;
  CHECK_THROWS_AS(raychaudhuri_propagate(init, RaySources{}, UniformAxis{0.0, 1e-2, 11}),
                  DomainError);
}

TEST_CASE("tabulated files round-trip bit for bit") {
  BackgroundFoliation bg = schwarzschild(8, 1.0, 1.0, 2.0, 21);
  std::string path = (std::filesystem::temp_directory_path() / "nullflow_bg_roundtrip.txt").string();
  write_background(bg, path);
  BackgroundFoliation back = read_background(path);
  CHECK(back.grid == bg.grid);
  CHECK(back.coord.n == bg.coord.n);
  CHECK(back.coord.x0 == bg.coord.x0);
  CHECK(back.coord.dx == bg.coord.dx);
  CHECK(back.affine == bg.affine);
  CHECK(back.has_l_side == bg.has_l_side);
  CHECK(back.has_l_shear == bg.has_l_shear);
  bool identical = true;
  for (std::size_t k = 0; k < bg.n_slices(); ++k) {
    for (std::size_t i = 0; i < bg.grid.size(); ++i) {
      identical = identical && back.gamma[k].tt(i) == bg.gamma[k].tt(i) &&
                  back.gamma[k].pp(i) == bg.gamma[k].pp(i) &&
                  back.trchi[k][i] == bg.trchi[k][i] &&
                  back.trchibar[k][i] == bg.trchibar[k][i];
    }
  }
  CHECK(identical);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_background("/nonexistent/nullflow.txt"), FormatError);
}

}  // TEST_SUITE
