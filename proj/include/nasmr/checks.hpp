#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nasmr/scenario.hpp"
#include "nasmr/transcript.hpp"

namespace nasmr {

struct CheckResult {
  std::string name;
  bool pass = true;
  std::optional<std::uint64_t> first_violation_seq;
  std::string note;
};

struct CheckReport {
  std::vector<CheckResult> results;
  std::map<std::string, std::string> metrics;

  bool all_pass() const;
  // Line-delimited records mirroring the transcript format.
  std::string render() const;
};

// Verdicts are functions of the transcript alone (plus the config echoed on
// its first line), so they are re-checkable offline.
std::vector<std::string> check_names();
bool check_known(const std::string& name);

// Runs the named checks (or the config's `checks` list when `names` is
// empty) and fills the standard metrics.
CheckReport run_checks(const ParsedTranscript& t, const ScenarioConfig& cfg,
                       const std::vector<std::string>& names = {});

// Default check set for a protocol, used when the config lists none.
std::vector<std::string> default_checks(const std::string& protocol, NetConfig::Mode mode);

}  // namespace nasmr
