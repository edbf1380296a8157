#pragma once

#include <string>

#include "nullflow/field.hpp"

namespace nullflow {

/// A flow state frozen to disk: the surface, the time it was reached, and the
/// step size the writing run was using (0 when not applicable). The text
/// format stores every double as a hexadecimal float, so a write/read
/// round-trip is bit-exact and a resumed run can reproduce the original
/// step sequence.
struct FlowSnapshot {
  ScalarField omega;
  double time = 0.0;
  double step_hint = 0.0;
};

void write_snapshot(const FlowSnapshot& snap, const std::string& path);
FlowSnapshot read_snapshot(const std::string& path);

}  // namespace nullflow
