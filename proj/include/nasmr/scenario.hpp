#pragma once

#include <map>
#include <string>
#include <vector>

#include "nasmr/types.hpp"

namespace nasmr {

struct NetConfig {
  enum class Mode { Sync, Async };
  Mode mode = Mode::Sync;
  Time delta = 1;
  Time horizon = 1000;
  std::uint64_t seed = 1;
};

struct CorruptionEvent {
  Time time = 0;
  PartyId party = 0;
};

struct TxInjection {
  Time time = 0;
  std::vector<PartyId> targets;  // empty = all parties
  Bytes payload;
};

struct ScenarioConfig {
  std::uint64_t format = 1;
  std::uint64_t session = 1;
  ProtocolParams params;
  NetConfig net;

  // rbc | aba | acs | gc | bla | smr | wba
  std::string protocol = "smr";
  std::uint64_t slots = 1;  // smr/wba slot budget
  PartyId rbc_sender = 1;

  std::map<PartyId, Bytes> inputs;  // per-party value payloads (rbc/acs/gc/bla)
  std::map<PartyId, bool> bits;     // per-party bit inputs (aba/wba)
  std::vector<TxInjection> txs;     // smr workload

  std::string strategy = "benign";
  std::uint32_t budget = 0;
  std::vector<CorruptionEvent> corrupt_at;
  std::map<std::string, std::int64_t> strategy_params;

  std::vector<std::string> checks;

  void validate() const;  // throws ConfigError naming the offending field
  std::string canonical_text() const;
  static ScenarioConfig from_text(const std::string& json_text);  // throws ConfigError

  Time bla_duration() const {
    return 5 * static_cast<Time>(params.kappa) * net.delta;
  }
  Time slot_period() const { return net.delta + bla_duration(); }

  std::int64_t strategy_param(const std::string& key, std::int64_t fallback) const {
    auto it = strategy_params.find(key);
    return it == strategy_params.end() ? fallback : it->second;
  }
};

}  // namespace nasmr
