#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nullflow/background.hpp"
#include "nullflow/field.hpp"
#include "nullflow/numerics.hpp"

namespace nullflow {

/// Expansion E(omega) = tr chi / 2 of the cross-section graph r = omega(z),
/// with respect to the graph's outward null normal (generator-normalized):
///   E = -Lap_{g(omega)} omega - 2 g^{ij} tau_i d_j omega + trchi(omega)/2
///       + (trchibar(omega)/2 - kappa(omega)) |grad omega|^2.
/// The flow moves level sets by d/dt omega = -E. Requires L-side background
/// data (CapabilityError otherwise).
ScalarField expansion_of(const BackgroundFoliation& bg, const ScalarField& omega,
                         Interp interp = Interp::Cubic);

/// Full second fundamental form of the graph along its outward null normal:
///   (chi_w)_ij = chi_ij - 2 (d_i w tau_j + tau_i d_j w) - 2 kappa d_i w d_j w
///                + |grad w|^2 chibar_ij - 2 Hess_ij w,
/// whose g(omega)-trace equals 2 E(omega) in the continuum. Requires the
/// tensor-valued L-side shear (CapabilityError otherwise).
SymTensor2Field chi_graph(const BackgroundFoliation& bg, const ScalarField& omega,
                          Interp interp = Interp::Cubic);

/// Decomposition of the graph's outward null normal over the background null
/// frame: one part generator, l_coeff parts null partner, and a tangential
/// part with the stored contravariant components (-2 grad omega).
struct NullPartnerCoefficients {
  ScalarField k_coeff;   ///< coefficient of the generator (identically one)
  ScalarField l_coeff;   ///< coefficient of the null partner: |grad omega|^2
  CovectorField tangent; ///< contravariant components of -2 grad omega
};
NullPartnerCoefficients null_partner_coefficients(const BackgroundFoliation& bg,
                                                  const ScalarField& omega,
                                                  Interp interp = Interp::Cubic);

/// Forward-difference residual of the induced-metric transport law
///   d/dt gamma(omega(t)) = -trchi_w chibar(omega),
/// evaluated from two flow states a time dt apart. First order in dt.
SymTensor2Field metric_evolution_residual(const BackgroundFoliation& bg, const ScalarField& omega_t,
                                          const ScalarField& omega_t_plus_dt, double dt,
                                          Interp interp = Interp::Cubic);

struct FlowConfig {
  double eps_mots = 1e-6;   ///< converged when max |tr chi_w| < eps_mots
  double cfl = 0.2;         ///< dt = cfl / max(g^tt/h_t^2 + g^pp/h_p^2)
  double dt_fixed = 0.0;    ///< > 0: use this step instead of the CFL step
  double dt_min = 1e-10;    ///< below this the step control gives up
  double max_time = 100.0;
  double history_every = 0.0;  ///< > 0: record (omega, E) frames on this cadence
  std::size_t stall_window = 1000;  ///< steps without progress before stopping
  double stall_tol = 1e-12;        ///< required decrease of max |tr chi_w|
  Interp interp = Interp::Cubic;
};

enum class FlowStatus {
  Converged,       ///< max |tr chi_w| fell below eps_mots
  MaxTimeReached,  ///< ran to max_time (or stalled) without converging
};
std::string to_string(FlowStatus status);

/// Per-step monitor record.
struct FlowStepRow {
  double t;             ///< time at the START of the step
  double dt;            ///< accepted step size
  double max_abs_trchi; ///< max |tr chi_w| before the step
  double min_trchi;     ///< min tr chi_w before the step (positivity monitor)
  double max_u;         ///< max |grad omega|^2 / 2 before the step
  double omega_min;     ///< min omega before the step
  double omega_max;     ///< max omega before the step
  double max_increase;  ///< max nodewise omega increase across the step
};

/// Uniform-cadence (t, omega, E) frames for downstream interpolation in time.
struct FlowHistory {
  UniformAxis time{0.0, 1.0, 0};
  std::vector<ScalarField> omega;
  std::vector<ScalarField> expansion;
};

struct FlowResult {
  FlowStatus status;
  bool stalled;
  double t_end;
  std::size_t steps;
  double dt_base = 0.0;   ///< unclipped step base (dt_fixed, or the CFL step at the final state)
  ScalarField omega;      ///< final graph
  ScalarField expansion;  ///< E at the final graph
  std::vector<FlowStepRow> series;
  FlowHistory history;
};

/// Explicit fourth-order driver for d/dt omega = -E(omega).
///
/// Construction evaluates E(omega0) and enforces the strictly-untrapped start
/// E > 0 at every node (PreconditionError with the violating nodes). Each
/// step retries with a halved dt when an intermediate stage leaves the
/// background table; once dt falls below dt_min the domain error propagates.
/// Non-finite values raise StiffnessError.
class FlowStepper {
public:
  FlowStepper(const BackgroundFoliation& bg, ScalarField omega0, FlowConfig config);

  /// Advances one accepted step; returns its monitor row.
  FlowStepRow step();

  /// Steps until convergence, max_time, or stall; returns the full record.
  FlowResult run_to_mots();

  double t() const { return t_; }
  /// Current unclipped step base: dt_fixed when set, else the CFL step at the
  /// present state. A continuation run that fixes its dt to this value walks
  /// the same step lattice this run would have used.
  double dt_base() const { return config_.dt_fixed > 0.0 ? config_.dt_fixed : cfl_dt_; }
  std::size_t steps_taken() const { return steps_; }
  const ScalarField& omega() const { return omega_; }
  const ScalarField& expansion() const { return expansion_; }
  double max_abs_trchi() const;
  const std::vector<FlowStepRow>& series() const { return series_; }
  const FlowHistory& history() const { return history_; }
  const FlowConfig& config() const { return config_; }

private:
  void refresh_expansion();  // recomputes expansion_ and the CFL scale at omega_
  void record_frame_if_due();

  const BackgroundFoliation* bg_;
  FlowConfig config_;
  double t_ = 0.0;
  std::size_t steps_ = 0;
  ScalarField omega_;
  ScalarField expansion_;
  double cfl_dt_ = 0.0;
  double max_u_ = 0.0;
  std::vector<FlowStepRow> series_;
  FlowHistory history_;
};

/// One-call driver: construct a stepper and run it to the end.
FlowResult run_to_mots(const BackgroundFoliation& bg, const ScalarField& omega0,
                       const FlowConfig& config);

}  // namespace nullflow
