#pragma once

#include <doctest.h>

#include "nasmr/checks.hpp"
#include "nasmr/runner.hpp"

namespace nasmr::test {

// Baseline n=4 scenario; tests override what they need.
inline ScenarioConfig base_config() {
  ScenarioConfig cfg;
  cfg.params.n = 4;
  cfg.params.t_a = 1;
  cfg.params.t_s = 1;
  cfg.params.kappa = 4;
  cfg.net.mode = NetConfig::Mode::Sync;
  cfg.net.delta = 2;
  cfg.net.horizon = 4000;
  cfg.net.seed = 7;
  return cfg;
}

inline ParsedTranscript parse_or_fail(const std::string& text) {
  auto parsed = parse_transcript(text);
  REQUIRE(parsed.has_value());
  return *parsed;
}

// Runs one scenario and its checks; returns the report.
inline CheckReport run_and_check(const ScenarioConfig& cfg,
                                 const std::vector<std::string>& checks = {}) {
  auto run = run_scenario(cfg);
  auto parsed = parse_or_fail(run.transcript_text);
  return run_checks(parsed, cfg, checks);
}

inline void require_all_pass(const CheckReport& rep) {
  for (const auto& r : rep.results) {
    INFO(r.name << ": " << r.note);
    CHECK(r.pass);
  }
}

// Output payloads of one kind for one party.
inline std::vector<Bytes> outputs_of(const ParsedTranscript& t, PartyId p,
                                     const std::string& kind) {
  std::vector<Bytes> out;
  for (const auto& r : t.records) {
    if (r.kind != RecordKind::Output || r.src != p) continue;
    auto pos = r.note.find(' ');
    std::string k = pos == std::string::npos ? r.note : r.note.substr(0, pos);
    if (k == kind) out.push_back(r.payload);
  }
  return out;
}

}  // namespace nasmr::test
