#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nullflow/background.hpp"
#include "nullflow/field.hpp"
#include "nullflow/flow.hpp"

namespace nullflow {

/// Result of one acceptance scenario: a verdict plus one note per checked
/// property (failed checks are prefixed with "FAILED:").
struct ScenarioOutcome {
  std::string name;
  bool passed = false;
  std::vector<std::string> notes;
};

/// Lazily built artifacts shared between scenarios, so the acceptance suite
/// runs each expensive flow exactly once.
class ScenarioContext {
public:
  /// Black-hole cone r in [1, 4] on an axisymmetric lattice of the given size.
  const BackgroundFoliation& black_hole(std::size_t n_theta);

  /// The located-horizon run: n_theta = 128, initial surface 3 + 0.3 cos
  /// theta, run to convergence with frames every 4 time units.
  const FlowResult& horizon_run();

  /// The same initial surface advanced to t = 4 on the given lattice
  /// (128 reads the frame from horizon_run; 256/512 run dedicated flows).
  const ScalarField& quarter_state(std::size_t n_theta);

  /// Uniform start at r = 3 on n_theta = 32, advanced to t = 30 with frames
  /// every 0.0025 (dense enough for every smoothing width the suite uses).
  const FlowResult& uniform_run();

  /// Wall-clock seconds spent building the horizon_run/quarter_state family.
  double horizon_seconds() const { return horizon_seconds_; }

private:
  std::map<std::size_t, BackgroundFoliation> black_hole_;
  std::optional<FlowResult> horizon_run_;
  std::map<std::size_t, ScalarField> quarter_;
  std::optional<FlowResult> uniform_run_;
  double horizon_seconds_ = 0.0;
};

/// The scenario names, in criterion order.
const std::vector<std::string>& scenario_names();

/// Runs one scenario (DomainError for an unknown name). Exceptions inside the
/// scenario body are converted into a failed outcome.
ScenarioOutcome run_scenario(const std::string& name, ScenarioContext& ctx);

}  // namespace nullflow
