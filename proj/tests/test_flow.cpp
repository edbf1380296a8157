#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "nullflow/background.hpp"
#include "nullflow/calculus.hpp"
#include "nullflow/errors.hpp"
#include "nullflow/flow.hpp"
#include "nullflow/gauge.hpp"

using namespace nullflow;

namespace {

BackgroundFoliation schw(const SphereGrid& grid, std::size_t n_slices = 301) {
  // Area radius r in [1, 4] around the r = 2 horizon of a unit mass.
  return build_analytic(SchwarzschildCone{1.0, 1.0}, grid, 3.0, n_slices);
}

BackgroundFoliation mink(const SphereGrid& grid, std::size_t n_slices = 301) {
  return build_analytic(MinkowskiCone{1.0}, grid, 3.0, n_slices);
}

double sup_abs(const ScalarField& f) {
  return std::max(std::abs(f.min()), std::abs(f.max()));
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("graph expansion matches the flat-cone closed form") {
  // The lattice with 65 rows puts a node exactly on the equator (i = 32).
  SphereGrid grid = SphereGrid::axisymmetric(65);
  BackgroundFoliation bg = mink(grid);

  SUBCASE("round graphs are exact") {
    ScalarField omega(grid, 2.0);  // lattice value of the coordinate
    ScalarField e = expansion_of(bg, omega);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(e[i] == doctest::Approx(0.5).epsilon(1e-13));
    }
  }

  SUBCASE("perturbed graph at the equator") {
    ScalarField omega = ScalarField::from_function(
        grid, [](double t, double) { return 2.0 + 0.1 * std::cos(t); });
    ScalarField e = expansion_of(bg, omega);
    // 1/2 + |grad omega|^2 / (2 omega) with omega = 2, |grad omega|^2 = 0.0025.
    CHECK(std::abs(e[32] - 0.50125) <= 2e-6);  // measured 9.7e-7
  }
}

TEST_CASE("graph expansion vanishes on the horizon cross-section") {
  SphereGrid grid = SphereGrid::axisymmetric(33);
  BackgroundFoliation bg = schw(grid);
  ScalarField omega(grid, 2.0);
  ScalarField e = expansion_of(bg, omega);
  CHECK(sup_abs(e) <= 1e-13);

  ScalarField above(grid, 2.5);
  ScalarField ea = expansion_of(bg, above);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(ea[i] == doctest::Approx(0.08).epsilon(1e-12));  // (1/2.5)(1 - 2/2.5)
  }
}

TEST_CASE("null partner coefficients of a graph") {
  SphereGrid grid = SphereGrid::axisymmetric(65);
  BackgroundFoliation bg = schw(grid);
  ScalarField omega = ScalarField::from_function(
      grid, [](double t, double) { return 3.0 + 0.3 * std::cos(t); });
  NullPartnerCoefficients c = null_partner_coefficients(bg, omega);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(c.k_coeff[i] == 1.0);
    CHECK(c.tangent.p(i) == 0.0);  // axisymmetric graph
  }
  // Equator node: |grad omega|^2 = (0.3/3)^2 = 0.01, so the steepness
  // monitor u = |grad omega|^2 / 2 takes the value 0.005 there.
  CHECK(std::abs(0.5 * c.l_coeff[32] - 0.005) <= 5e-5);   // measured 1.6e-6
  // Tangential part is -2 grad omega: component +0.3 sin(t) * 2 / omega^2.
  CHECK(std::abs(c.tangent.t(32) - 2.0 * 0.3 / 9.0) <= 5e-5);
}

TEST_CASE("expansion is covariant under reparametrization of the foliation") {
  // The same surface described in two gauges must have proportional
  // expansions, the factor being the generator rescaling a at the surface.
  // The fine coordinate table keeps interpolation error out of the budget.
  SphereGrid grid = SphereGrid::axisymmetric(64);
  BackgroundFoliation bg = schw(grid, 3001);
  GaugeProfile gauge = construct_gauge(bg, 0.5);
  BackgroundFoliation repar = reparametrize(bg, gauge, 0);

  ScalarField omega = ScalarField::from_function(
      grid, [](double t, double) { return 2.5 + 0.45 * std::cos(t); });
  // New coordinate of the same surface: s(r) = log(1 + log r).
  ScalarField omega_s = ScalarField::from_function(grid, [](double t, double) {
    return std::log(1.0 + std::log(2.5 + 0.45 * std::cos(t)));
  });

  ScalarField e_base = expansion_of(bg, omega);
  ScalarField e_repar = expansion_of(repar, omega_s);

  double sup = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = omega[i];
    const double a = r * (1.0 + std::log(r));  // rescaling of this table
    sup = std::max(sup, std::abs(e_repar[i] - e_base[i] / a));
  }
  const double tolerance = 5e-5;
  CHECK(sup <= tolerance);  // measured 1.90e-5, decaying at second order

  // Power check: flipping the sign of the inaffinity term in the expansion
  // would shift e_repar by 2 kappa |grad omega_s|^2, far above the tolerance.
  SliceSample s = sample_at(repar, omega_s);
  ScalarField u2 = grad_norm_sq(s.gamma, omega_s);
  double wrong_sign_shift = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    wrong_sign_shift = std::max(wrong_sign_shift, 2.0 * s.kappa[i] * u2[i]);
  }
  CHECK(wrong_sign_shift >= 100.0 * tolerance);  // measured 9.83e-3
}

TEST_CASE("second fundamental form of the graph") {
  SUBCASE("its trace agrees with twice the expansion at second order") {
    double d32 = 0.0, d64 = 0.0;
    for (std::size_t n : {std::size_t{32}, std::size_t{64}}) {
      SphereGrid grid = SphereGrid::axisymmetric(n);
      BackgroundFoliation bg = schw(grid);
      ScalarField omega = ScalarField::from_function(
          grid, [](double t, double) { return 2.0 + 0.1 * std::cos(t); });
      SliceSample s = sample_at(bg, omega);
      SymTensor2Field chi = chi_graph(bg, omega);
      ScalarField tr = trace(s.gamma, chi);
      ScalarField e = expansion_of(bg, omega);
      double sup = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        sup = std::max(sup, std::abs(tr[i] - 2.0 * e[i]));
      }
      (n == 32 ? d32 : d64) = sup;
    }
    CHECK(d64 <= 1e-4);         // measured 3.76e-5
    CHECK(d32 / d64 >= 3.4);    // measured 3.97: second-order two-path defect
  }

  SUBCASE("pure-trace content on a round graph") {
    SphereGrid grid = SphereGrid::axisymmetric(33);
    BackgroundFoliation bg = schw(grid);
    ScalarField omega(grid, 2.5);
    SymTensor2Field chi = chi_graph(bg, omega);
    SliceSample s = sample_at(bg, omega);
    // chi = (trchi/2) gamma for a coordinate sphere: traceless part vanishes.
    SymTensor2Field dev = traceless_part(s.gamma, chi);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(dev.tt(i)) <= 1e-12);
      CHECK(std::abs(dev.tp(i)) <= 1e-12);
      CHECK(std::abs(dev.pp(i)) <= 1e-12);
      CHECK(chi.tt(i) == doctest::Approx(0.08 * s.gamma.tt(i)).epsilon(1e-10));
    }
  }

  SUBCASE("tables without the partner shear are rejected") {
    SphereGrid grid = SphereGrid::axisymmetric(8);
    RayInitial init{MetricField::round_scaled(grid, [](std::size_t) { return 1.0; }),
                    ScalarField(grid, 2.0), SymTensor2Field(grid)};
    BackgroundFoliation kb =
        raychaudhuri_propagate(init, RaySources{}, UniformAxis{0.0, 0.05, 21});
    ScalarField omega(grid, 0.5);
    CHECK_THROWS_AS((void)expansion_of(kb, omega), CapabilityError);
    CHECK_THROWS_AS((void)chi_graph(kb, omega), CapabilityError);
  }
}

TEST_CASE("uniform flow reduces to the radial equation") {
  SphereGrid grid = SphereGrid::axisymmetric(16);
  BackgroundFoliation bg = schw(grid);
  ScalarField omega0(grid, 3.0);

  FlowConfig cfg;
  cfg.max_time = 30.0;
  cfg.history_every = 0.005;
  FlowResult res = run_to_mots(bg, omega0, cfg);

  CHECK(res.status == FlowStatus::MaxTimeReached);
  CHECK(res.t_end == doctest::Approx(30.0).epsilon(1e-12));
  REQUIRE(res.history.time.n == 6001);
  CHECK(res.history.time.dx == doctest::Approx(0.005).epsilon(1e-14));

  // The graph must stay uniform to rounding: no tangential term can act.
  for (const ScalarField& w : res.history.omega) {
    CHECK(w.max() - w.min() <= 1e-12);
  }

  // Reference: the one-dimensional reduction dw/dt = -(1/w)(1 - 2/w),
  // integrated with ten substeps per frame so its own error is negligible.
  std::vector<double> ref = {3.0};
  ref.reserve(6001);
  const auto rhs = [](double, const std::vector<double>& y, std::vector<double>& dy) {
    dy[0] = -(1.0 / y[0]) * (1.0 - 2.0 / y[0]);
  };
  std::vector<double> y = {3.0};
  for (std::size_t k = 1; k < 6001; ++k) {
    for (int sub = 0; sub < 10; ++sub) {
      rk4_step(0.0, 0.0005, y, rhs);
    }
    ref.push_back(y[0]);
  }
  double sup = 0.0;
  for (std::size_t k = 0; k < 6001; ++k) {
    sup = std::max(sup, std::abs(res.history.omega[k][0] - ref[k]));
  }
  CHECK(sup <= 1e-8);  // measured 2.18e-9: interpolation noise only

  // After t = 30 the graph hangs just outside the horizon.
  const double gap = res.omega[0] - 2.0;
  CHECK(gap > 5e-4);   // measured 1.7007e-3
  CHECK(gap < 2e-3);

  // Monitors: strict nodewise decrease and positive expansion throughout.
  for (const FlowStepRow& row : res.series) {
    CHECK(row.max_increase <= 0.0);
    CHECK(row.min_trchi > 0.0);
  }
}

TEST_CASE("perturbed flow settles on the marginal cross-section") {
  SphereGrid grid = SphereGrid::axisymmetric(32);
  BackgroundFoliation bg = schw(grid);
  ScalarField omega0 = ScalarField::from_function(
      grid, [](double t, double) { return 3.0 + 0.3 * std::cos(t); });

  FlowConfig cfg;
  FlowResult res = run_to_mots(bg, omega0, cfg);

  CHECK(res.status == FlowStatus::Converged);
  CHECK(res.t_end > 40.0);  // measured 57.06
  CHECK(res.t_end < 70.0);
  CHECK(2.0 * sup_abs(res.expansion) < cfg.eps_mots);

  // The marginal set of this table is the r = 2 horizon.
  double err = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    err = std::max(err, std::abs(res.omega[i] - 2.0));
  }
  CHECK(err <= 1e-5);  // measured 2.0e-6: stop threshold, not resolution, limits

  const double level = bg.trapped_level();
  double omega_min_run = res.series.front().omega_min;
  double omega_max_run = res.series.front().omega_max;
  double u_max_run = 0.0;
  double u_max_early = 0.0;
  double worst_increase = -1.0;
  double min_trchi_run = 1e300;
  for (const FlowStepRow& row : res.series) {
    omega_min_run = std::min(omega_min_run, row.omega_min);
    omega_max_run = std::max(omega_max_run, row.omega_max);
    u_max_run = std::max(u_max_run, row.max_u);
    if (row.t <= 0.1 * res.t_end) u_max_early = std::max(u_max_early, row.max_u);
    worst_increase = std::max(worst_increase, row.max_increase);
    min_trchi_run = std::min(min_trchi_run, row.min_trchi);
  }
  omega_min_run = std::min(omega_min_run, res.omega.min());
  omega_max_run = std::max(omega_max_run, res.omega.max());

  // Confinement: the run never dips to the trapped level and never exceeds
  // its own initial ceiling.
  CHECK(omega_min_run - level > 0.0);
  CHECK(omega_max_run <= 3.3 + 1e-12);
  // Graph steepness: the late flow never exceeds twice the early steepness.
  CHECK(u_max_early > 0.0);
  CHECK(u_max_run <= 2.0 * u_max_early);
  // Nodewise monotone descent and positive expansion throughout.
  CHECK(worst_increase <= 1e-12);
  CHECK(min_trchi_run > -1e-10);
}

TEST_CASE("flow exits a table that has no marginal set") {
  SphereGrid grid = SphereGrid::axisymmetric(16);
  BackgroundFoliation bg = mink(grid);
  ScalarField omega0(grid, 2.0);

  FlowConfig cfg;
  cfg.max_time = 10.0;
  FlowStepper stepper(bg, omega0, cfg);

  bool exited = false;
  std::vector<std::size_t> nodes;
  try {
    for (int k = 0; k < 200000; ++k) stepper.step();
  } catch (const ExitedDomainError& err) {
    exited = true;
    nodes = err.nodes();
  }
  REQUIRE(exited);
  CHECK(nodes.size() == grid.size());  // the uniform graph exits everywhere

  // dw/dt = -1/w, so w^2 = 4 - 2t: the inner edge r = 1 is met at t = 1.5.
  CHECK(stepper.t() > 1.45);
  CHECK(stepper.t() < 1.5 + 1e-6);
  const double w = stepper.omega()[0];
  CHECK(std::abs(w * w - (4.0 - 2.0 * stepper.t())) <= 1e-7);

  // Expansion stayed strictly positive up to the exit.
  CHECK(!stepper.series().empty());
  for (const FlowStepRow& row : stepper.series()) {
    CHECK(row.min_trchi >= 0.99);
  }
}

TEST_CASE("flow refuses a start that is not strictly untrapped") {
  SphereGrid grid = SphereGrid::axisymmetric(32);
  BackgroundFoliation bg = schw(grid);
  FlowConfig cfg;

  SUBCASE("entirely trapped start") {
    ScalarField omega0(grid, 1.5);
    try {
      FlowStepper stepper(bg, omega0, cfg);
      FAIL("expected a precondition failure");
    } catch (const PreconditionError& err) {
      CHECK(err.nodes().size() == grid.size());
    }
  }

  SUBCASE("partially trapped start lists the offending cap") {
    ScalarField omega0 = ScalarField::from_function(
        grid, [](double t, double) { return 2.0 + 0.3 * std::cos(t); });
    try {
      FlowStepper stepper(bg, omega0, cfg);
      FAIL("expected a precondition failure");
    } catch (const PreconditionError& err) {
      REQUIRE(!err.nodes().empty());
      CHECK(err.nodes().size() < grid.size());
      for (std::size_t idx : err.nodes()) {
        CHECK(grid.theta(grid.row(idx)) > 1.5707);  // lower hemisphere only
      }
    }
  }
}

TEST_CASE("flow configuration and shape guards") {
  SphereGrid grid = SphereGrid::axisymmetric(16);
  BackgroundFoliation bg = schw(grid);
  ScalarField omega0(grid, 3.0);

  FlowConfig bad;
  bad.cfl = 0.0;
  CHECK_THROWS_AS(FlowStepper(bg, omega0, bad), DomainError);

  ScalarField wrong(SphereGrid::axisymmetric(8), 3.0);
  CHECK_THROWS_AS(FlowStepper(bg, wrong, FlowConfig{}), ShapeError);

  FlowConfig stiff;
  stiff.dt_min = 1.0;  // above the explicit stability step: must refuse
  FlowStepper stepper(bg, omega0, stiff);
  CHECK_THROWS_AS((void)stepper.step(), StiffnessError);
}

TEST_CASE("flow stalls once progress falls below the step tolerance") {
  SphereGrid grid = SphereGrid::axisymmetric(16);
  BackgroundFoliation bg = schw(grid);
  ScalarField omega0(grid, 3.0);

  FlowConfig cfg;
  cfg.eps_mots = 1e-18;  // unreachable: the per-step decrease dies out first
  cfg.max_time = 1e6;
  FlowResult res = run_to_mots(bg, omega0, cfg);

  CHECK(res.status == FlowStatus::MaxTimeReached);
  CHECK(res.stalled);
  CHECK(res.t_end < 1000.0);
  CHECK(2.0 * sup_abs(res.expansion) < 1e-8);  // measured floor 1.6e-14
}

TEST_CASE("induced metric transport residual is first order in dt") {
  SphereGrid grid = SphereGrid::axisymmetric(32);
  BackgroundFoliation bg = schw(grid);
  ScalarField omega0 = ScalarField::from_function(
      grid, [](double t, double) { return 3.0 + 0.3 * std::cos(t); });

  const auto advance = [&](double dt) {
    FlowConfig cfg;
    cfg.dt_fixed = dt;
    FlowStepper stepper(bg, omega0, cfg);
    stepper.step();
    return stepper.omega();
  };
  SliceSample s0 = sample_at(bg, omega0);

  const auto residual_norm = [&](double dt) {
    SymTensor2Field r = metric_evolution_residual(bg, omega0, advance(dt), dt);
    ScalarField n = tensor_norm(s0.gamma, r);
    return n.max();
  };

  const double r1 = residual_norm(0.02);
  const double r2 = residual_norm(0.01);
  CHECK(r1 <= 1e-3);            // measured 3.47e-4 at dt = 0.02
  CHECK(r1 / r2 >= 1.7);        // measured ratio 1.994: first order
  CHECK(r1 / r2 <= 2.3);

  CHECK_THROWS_AS(
      (void)metric_evolution_residual(bg, omega0, omega0, 0.0), DomainError);
}

}  // TEST_SUITE
