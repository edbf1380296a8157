// Acceptance gate: runs every scenario once with shared artifacts and prints
// one verdict line per criterion. Exits nonzero if any criterion fails.

#include <cstdio>
#include <string>

#include "nullflow/scenarios.hpp"

int main() {
  nullflow::ScenarioContext ctx;
  const std::vector<std::string>& names = nullflow::scenario_names();
  bool all_passed = true;

  for (std::size_t i = 0; i < names.size(); ++i) {
    nullflow::ScenarioOutcome out = nullflow::run_scenario(names[i], ctx);
    all_passed = all_passed && out.passed;
    std::string detail;
    for (const std::string& note : out.notes) {
      detail += (detail.empty() ? "" : "; ") + note;
    }
    std::printf("[%s] criterion %zu: %s — %s\n", out.passed ? "PASS" : "FAIL", i + 1,
                out.name.c_str(), detail.c_str());
    std::fflush(stdout);
  }

  return all_passed ? 0 : 1;
}
