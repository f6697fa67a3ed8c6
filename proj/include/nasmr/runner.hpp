#pragma once

#include <string>

#include "nasmr/checks.hpp"
#include "nasmr/scenario.hpp"

namespace nasmr {

struct RunResult {
  std::string transcript_text;
  Digest transcript_digest;
};

// Instantiates parties, oracles and the adversary, and drives the event loop
// to horizon or quiescence.
RunResult run_scenario(const ScenarioConfig& cfg);

// Re-executes the transcript's embedded config; true iff byte-identical.
bool replay_matches(const std::string& transcript_text, std::string* note = nullptr);

// The threshold-violation experiment. Refuses configs with t_a + 2 t_s < n
// (the demo would be vacuous) and fills in the split-world workload.
struct DemoResult {
  RunResult run;
  CheckReport report;
};
DemoResult demo_lower_bound(ScenarioConfig cfg);

// Prepares the demo workload (m_b injections into camp b) without running.
ScenarioConfig lower_bound_scenario(ScenarioConfig cfg);

}  // namespace nasmr
