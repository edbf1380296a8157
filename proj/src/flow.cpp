#include "nullflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "nullflow/calculus.hpp"
#include "nullflow/errors.hpp"

namespace nullflow {

namespace {

// Expansion of the graph together with the quantities the driver monitors:
// the explicit-step scale and the steepness |grad omega|^2 / 2.
struct GraphEval {
  ScalarField expansion;
  double inv_scale;  // max over nodes of g^tt/h_t^2 + g^pp/h_p^2
  double max_u;      // max over nodes of |grad omega|^2 / 2
};

GraphEval evaluate_graph(const BackgroundFoliation& bg, const ScalarField& omega,
                         Interp interp) {
  if (!bg.has_l_side) {
    throw CapabilityError(
        "expansion of a graph needs the null-partner side of the background "
        "(trchi and the torsion); this table only carries generator data");
  }
  const SphereGrid& grid = omega.grid();
  SliceSample s = sample_at(bg, omega, interp);

  ScalarField lap = laplace_beltrami(s.gamma, omega);
  ScalarField u2 = grad_norm_sq(s.gamma, omega);
  CovectorField domega = differential(omega);
  ScalarField tau_dot = contract(s.gamma, s.tau, domega);

  GraphEval out{ScalarField(grid), 0.0, 0.0};
  const double ht2 = grid.h_theta() * grid.h_theta();
  const double hp2 = grid.h_phi() * grid.h_phi();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.expansion[i] = -lap[i] - 2.0 * tau_dot[i] + 0.5 * s.trchi[i] +
                       (0.5 * s.trchibar[i] - s.kappa[i]) * u2[i];
    const double scale = s.gamma.inv_tt(i) / ht2 + s.gamma.inv_pp(i) / hp2;
    out.inv_scale = std::max(out.inv_scale, scale);
    out.max_u = std::max(out.max_u, 0.5 * u2[i]);
  }
  return out;
}

bool all_finite(const ScalarField& f) {
  for (std::size_t i = 0; i < f.grid().size(); ++i) {
    if (!std::isfinite(f[i])) return false;
  }
  return true;
}

}  // namespace

ScalarField expansion_of(const BackgroundFoliation& bg, const ScalarField& omega,
                         Interp interp) {
  return evaluate_graph(bg, omega, interp).expansion;
}

SymTensor2Field chi_graph(const BackgroundFoliation& bg, const ScalarField& omega,
                          Interp interp) {
  if (!bg.has_l_side || !bg.has_l_shear) {
    throw CapabilityError(
        "the graph's full second fundamental form needs the tensor-valued "
        "null-partner shear, which this background table does not carry");
  }
  const SphereGrid& grid = omega.grid();
  SliceSample s = sample_at(bg, omega, interp);

  CovectorField domega = differential(omega);
  ScalarField u2 = grad_norm_sq(s.gamma, omega);
  SymTensor2Field hess = hessian(s.gamma, omega);
  const SymTensor2Field& hchi = *s.hchi;

  SymTensor2Field out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double dt = domega.t(i);
    const double dp = domega.p(i);
    const double taut = s.tau.t(i);
    const double taup = s.tau.p(i);
    const double chi_tt = hchi.tt(i) + 0.5 * s.trchi[i] * s.gamma.tt(i);
    const double chi_tp = hchi.tp(i) + 0.5 * s.trchi[i] * s.gamma.tp(i);
    const double chi_pp = hchi.pp(i) + 0.5 * s.trchi[i] * s.gamma.pp(i);
    const double bar_tt = s.hchibar.tt(i) + 0.5 * s.trchibar[i] * s.gamma.tt(i);
    const double bar_tp = s.hchibar.tp(i) + 0.5 * s.trchibar[i] * s.gamma.tp(i);
    const double bar_pp = s.hchibar.pp(i) + 0.5 * s.trchibar[i] * s.gamma.pp(i);
    const double k = s.kappa[i];
    out.tt(i) = chi_tt - 4.0 * dt * taut - 2.0 * k * dt * dt + u2[i] * bar_tt -
                2.0 * hess.tt(i);
    out.tp(i) = chi_tp - 2.0 * (dt * taup + taut * dp) - 2.0 * k * dt * dp +
                u2[i] * bar_tp - 2.0 * hess.tp(i);
    out.pp(i) = chi_pp - 4.0 * dp * taup - 2.0 * k * dp * dp + u2[i] * bar_pp -
                2.0 * hess.pp(i);
  }
  return out;
}

NullPartnerCoefficients null_partner_coefficients(const BackgroundFoliation& bg,
                                                  const ScalarField& omega,
                                                  Interp interp) {
  const SphereGrid& grid = omega.grid();
  SliceSample s = sample_at(bg, omega, interp);
  CovectorField domega = differential(omega);

  NullPartnerCoefficients out{ScalarField(grid, 1.0), grad_norm_sq(s.gamma, omega),
                              CovectorField(grid)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.tangent.t(i) =
        -2.0 * (s.gamma.inv_tt(i) * domega.t(i) + s.gamma.inv_tp(i) * domega.p(i));
    out.tangent.p(i) =
        -2.0 * (s.gamma.inv_tp(i) * domega.t(i) + s.gamma.inv_pp(i) * domega.p(i));
  }
  return out;
}

SymTensor2Field metric_evolution_residual(const BackgroundFoliation& bg,
                                          const ScalarField& omega_t,
                                          const ScalarField& omega_t_plus_dt, double dt,
                                          Interp interp) {
  if (!(dt > 0.0)) {
    throw DomainError("metric evolution residual needs a positive time offset");
  }
  require_same_grid(omega_t.grid(), omega_t_plus_dt.grid(), "metric evolution residual");
  const SphereGrid& grid = omega_t.grid();
  SliceSample a = sample_at(bg, omega_t, interp);
  SliceSample b = sample_at(bg, omega_t_plus_dt, interp);
  ScalarField expansion = expansion_of(bg, omega_t, interp);

  SymTensor2Field out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double trchi_w = 2.0 * expansion[i];
    const double bar_tt = a.hchibar.tt(i) + 0.5 * a.trchibar[i] * a.gamma.tt(i);
    const double bar_tp = a.hchibar.tp(i) + 0.5 * a.trchibar[i] * a.gamma.tp(i);
    const double bar_pp = a.hchibar.pp(i) + 0.5 * a.trchibar[i] * a.gamma.pp(i);
    out.tt(i) = (b.gamma.tt(i) - a.gamma.tt(i)) / dt + trchi_w * bar_tt;
    out.tp(i) = (b.gamma.tp(i) - a.gamma.tp(i)) / dt + trchi_w * bar_tp;
    out.pp(i) = (b.gamma.pp(i) - a.gamma.pp(i)) / dt + trchi_w * bar_pp;
  }
  return out;
}

std::string to_string(FlowStatus status) {
  switch (status) {
    case FlowStatus::Converged:
      return "converged";
    case FlowStatus::MaxTimeReached:
      return "max-time-reached";
  }
  return "unknown";
}

FlowStepper::FlowStepper(const BackgroundFoliation& bg, ScalarField omega0,
                         FlowConfig config)
    : bg_(&bg), config_(config), omega_(std::move(omega0)), expansion_(omega_.grid()) {
  if (omega_.grid() != bg.grid) {
    throw ShapeError("flow initial graph lives on a different lattice than the "
                     "background table");
  }
  if (!(config_.eps_mots > 0.0) || !(config_.cfl > 0.0) || !(config_.dt_min > 0.0) ||
      !(config_.max_time > 0.0) || config_.history_every < 0.0 ||
      config_.stall_window == 0) {
    throw DomainError("flow configuration values must be positive");
  }
  refresh_expansion();

  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < omega_.grid().size(); ++i) {
    if (!(expansion_[i] > 0.0)) bad.push_back(i);
  }
  if (!bad.empty()) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "initial graph is not strictly untrapped: expansion <= 0 at %zu "
                  "of %zu nodes",
                  bad.size(), omega_.grid().size());
    throw PreconditionError(msg, std::move(bad));
  }
  if (config_.history_every > 0.0) {
    history_.omega.push_back(omega_);
    history_.expansion.push_back(expansion_);
    history_.time = UniformAxis{0.0, config_.history_every, history_.omega.size()};
  }
}

void FlowStepper::refresh_expansion() {
  GraphEval eval = evaluate_graph(*bg_, omega_, config_.interp);
  expansion_ = std::move(eval.expansion);
  cfl_dt_ = config_.cfl / eval.inv_scale;
  max_u_ = eval.max_u;
}

double FlowStepper::max_abs_trchi() const {
  return 2.0 * std::max(std::abs(expansion_.min()), std::abs(expansion_.max()));
}

void FlowStepper::record_frame_if_due() {
  if (config_.history_every <= 0.0) return;
  const double target = config_.history_every * static_cast<double>(history_.omega.size());
  if (std::abs(t_ - target) <= 1e-9 * std::max(1.0, target)) {
    history_.omega.push_back(omega_);
    history_.expansion.push_back(expansion_);
    history_.time = UniformAxis{0.0, config_.history_every, history_.omega.size()};
  }
}

FlowStepRow FlowStepper::step() {
  const SphereGrid& grid = omega_.grid();
  const std::size_t n = grid.size();

  double dt = config_.dt_fixed > 0.0 ? config_.dt_fixed : cfl_dt_;
  if (dt < config_.dt_min) {
    throw StiffnessError("flow time step collapsed below the configured minimum "
                         "before any retry; the problem is too stiff for the "
                         "explicit driver");
  }
  const double remaining = config_.max_time - t_;
  if (remaining > 0.0) dt = std::min(dt, remaining);
  if (config_.history_every > 0.0) {
    const double next_frame =
        config_.history_every * static_cast<double>(history_.omega.size());
    if (next_frame > t_) dt = std::min(dt, next_frame - t_);
  }

  FlowStepRow row{t_,
                  dt,
                  max_abs_trchi(),
                  2.0 * expansion_.min(),
                  max_u_,
                  omega_.min(),
                  omega_.max(),
                  0.0};

  ScalarField stage(grid);
  ScalarField candidate(grid);
  while (true) {
    try {
      // Classical fourth-order step for d/dt omega = -E(omega).
      const ScalarField& k1 = expansion_;
      for (std::size_t i = 0; i < n; ++i) stage[i] = omega_[i] - 0.5 * dt * k1[i];
      ScalarField k2 = evaluate_graph(*bg_, stage, config_.interp).expansion;
      for (std::size_t i = 0; i < n; ++i) stage[i] = omega_[i] - 0.5 * dt * k2[i];
      ScalarField k3 = evaluate_graph(*bg_, stage, config_.interp).expansion;
      for (std::size_t i = 0; i < n; ++i) stage[i] = omega_[i] - dt * k3[i];
      ScalarField k4 = evaluate_graph(*bg_, stage, config_.interp).expansion;
      for (std::size_t i = 0; i < n; ++i) {
        candidate[i] =
            omega_[i] - dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
      GraphEval eval = evaluate_graph(*bg_, candidate, config_.interp);
      if (!all_finite(candidate) || !all_finite(eval.expansion)) {
        char msg[96];
        std::snprintf(msg, sizeof msg,
                      "flow produced non-finite values at t = %.12g", t_);
        throw StiffnessError(msg);
      }
      double max_inc = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        max_inc = std::max(max_inc, candidate[i] - omega_[i]);
      }
      row.dt = dt;
      row.max_increase = max_inc;
      omega_ = std::move(candidate);
      expansion_ = std::move(eval.expansion);
      cfl_dt_ = config_.cfl / eval.inv_scale;
      max_u_ = eval.max_u;
      break;
    } catch (const ExitedDomainError&) {
      dt *= 0.5;
      if (dt < config_.dt_min) throw;
      candidate = ScalarField(grid);
    }
  }

  t_ += row.dt;
  ++steps_;
  series_.push_back(row);
  record_frame_if_due();
  return row;
}

FlowResult FlowStepper::run_to_mots() {
  FlowStatus status = FlowStatus::MaxTimeReached;
  bool stalled = false;
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  while (true) {
    const double current = max_abs_trchi();
    if (current < config_.eps_mots) {
      status = FlowStatus::Converged;
      break;
    }
    if (t_ >= config_.max_time - 1e-12) {
      status = FlowStatus::MaxTimeReached;
      break;
    }
    if (current < best - config_.stall_tol) {
      best = current;
      since_best = 0;
    } else if (++since_best >= config_.stall_window) {
      status = FlowStatus::MaxTimeReached;
      stalled = true;
      break;
    }
    step();
  }

  return FlowResult{status,   stalled,    t_,       steps_,  dt_base(),
                    omega_,   expansion_, series_,  history_};
}

FlowResult run_to_mots(const BackgroundFoliation& bg, const ScalarField& omega0,
                       const FlowConfig& config) {
  FlowStepper stepper(bg, omega0, config);
  return stepper.run_to_mots();
}

}  // namespace nullflow
