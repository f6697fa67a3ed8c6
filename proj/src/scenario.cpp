#include "nasmr/scenario.hpp"

#include <json.hpp>

#include "nasmr/party.hpp"

namespace nasmr {

namespace {

using nlohmann::json;

Bytes hex_field(const json& j, const std::string& field) {
  if (!j.is_string()) throw ConfigError(field + " must be a hex string");
  Bytes out;
  if (!from_hex(j.get<std::string>(), out)) throw ConfigError(field + " is not valid hex");
  return out;
}

template <typename T>
T num_field(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(key + " must be a number");
  return j.at(key).get<T>();
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["format"] = c.format;
  j["session"] = c.session;
  j["params"] = {{"n", c.params.n},
                 {"t_a", c.params.t_a},
                 {"t_s", c.params.t_s},
                 {"kappa", c.params.kappa},
                 {"enforce_bound", c.params.enforce_bound}};
  j["net"] = {{"mode", c.net.mode == NetConfig::Mode::Sync ? "sync" : "async"},
              {"delta", c.net.delta},
              {"horizon", c.net.horizon},
              {"seed", c.net.seed}};
  j["protocol"] = c.protocol;
  j["slots"] = c.slots;
  j["rbc_sender"] = c.rbc_sender;

  json inputs = json::object();
  for (const auto& [p, v] : c.inputs) inputs[std::to_string(p)] = to_hex(v);
  j["inputs"] = inputs;
  json bits = json::object();
  for (const auto& [p, v] : c.bits) bits[std::to_string(p)] = v;
  j["bits"] = bits;
  json txs = json::array();
  for (const auto& t : c.txs) {
    txs.push_back({{"time", t.time}, {"targets", t.targets}, {"payload", to_hex(t.payload)}});
  }
  j["txs"] = txs;

  json adv;
  adv["strategy"] = c.strategy;
  adv["budget"] = c.budget;
  json corr = json::array();
  for (const auto& ce : c.corrupt_at) corr.push_back({{"time", ce.time}, {"party", ce.party}});
  adv["corrupt_at"] = corr;
  json sp = json::object();
  for (const auto& [k, v] : c.strategy_params) sp[k] = v;
  adv["params"] = sp;
  j["adversary"] = adv;

  j["checks"] = c.checks;
  return j;
}

ScenarioConfig parse_json(const json& j) {
  ScenarioConfig c;
  c.format = num_field<std::uint64_t>(j, "format", 1);
  if (c.format != 1) throw ConfigError("format: unsupported config format version");
  c.session = num_field<std::uint64_t>(j, "session", 1);

  if (!j.contains("params")) throw ConfigError("params missing");
  const json& p = j.at("params");
  c.params.n = num_field<std::uint32_t>(p, "n", 0);
  c.params.t_a = num_field<std::uint32_t>(p, "t_a", 0);
  c.params.t_s = num_field<std::uint32_t>(p, "t_s", 0);
  c.params.kappa = num_field<std::uint32_t>(p, "kappa", 1);
  c.params.enforce_bound = p.value("enforce_bound", true);

  if (!j.contains("net")) throw ConfigError("net missing");
  const json& n = j.at("net");
  std::string mode = n.value("mode", "sync");
  if (mode == "sync") {
    c.net.mode = NetConfig::Mode::Sync;
  } else if (mode == "async") {
    c.net.mode = NetConfig::Mode::Async;
  } else {
    throw ConfigError("net.mode must be sync or async");
  }
  c.net.delta = num_field<Time>(n, "delta", 1);
  c.net.horizon = num_field<Time>(n, "horizon", 1000);
  c.net.seed = num_field<std::uint64_t>(n, "seed", 1);

  c.protocol = j.value("protocol", "smr");
  c.slots = num_field<std::uint64_t>(j, "slots", 1);
  c.rbc_sender = num_field<PartyId>(j, "rbc_sender", 1);

  if (j.contains("inputs")) {
    for (const auto& [key, val] : j.at("inputs").items()) {
      c.inputs[static_cast<PartyId>(std::stoul(key))] = hex_field(val, "inputs." + key);
    }
  }
  if (j.contains("bits")) {
    for (const auto& [key, val] : j.at("bits").items()) {
      if (!val.is_boolean() && !val.is_number()) throw ConfigError("bits." + key);
      c.bits[static_cast<PartyId>(std::stoul(key))] =
          val.is_boolean() ? val.get<bool>() : (val.get<int>() != 0);
    }
  }
  if (j.contains("txs")) {
    for (const auto& t : j.at("txs")) {
      TxInjection inj;
      inj.time = num_field<Time>(t, "time", 0);
      if (t.contains("targets")) inj.targets = t.at("targets").get<std::vector<PartyId>>();
      inj.payload = hex_field(t.at("payload"), "txs.payload");
      c.txs.push_back(std::move(inj));
    }
  }

  if (j.contains("adversary")) {
    const json& a = j.at("adversary");
    c.strategy = a.value("strategy", "benign");
    c.budget = num_field<std::uint32_t>(a, "budget", 0);
    if (a.contains("corrupt_at")) {
      for (const auto& ce : a.at("corrupt_at")) {
        c.corrupt_at.push_back(
            {num_field<Time>(ce, "time", 0), num_field<PartyId>(ce, "party", 0)});
      }
    }
    if (a.contains("params")) {
      for (const auto& [key, val] : a.at("params").items()) {
        if (!val.is_number()) throw ConfigError("adversary.params." + key + " must be a number");
        c.strategy_params[key] = val.get<std::int64_t>();
      }
    }
  }
  if (j.contains("checks")) c.checks = j.at("checks").get<std::vector<std::string>>();
  return c;
}

}  // namespace

void ScenarioConfig::validate() const {
  params.validate();
  if (net.delta <= 0) throw ConfigError("net.delta must be positive");
  if (net.horizon <= 0) throw ConfigError("net.horizon must be finite and positive");
  if (!protocol_known(protocol)) throw ConfigError("protocol: unknown protocol " + protocol);
  if ((protocol == "gc" || protocol == "bla") && net.mode != NetConfig::Mode::Sync) {
    throw ConfigError("protocol " + protocol + " requires net.mode=sync (timers)");
  }
  if (protocol == "rbc" && (rbc_sender == 0 || rbc_sender > params.n)) {
    throw ConfigError("rbc_sender out of range");
  }
  if ((protocol == "smr" || protocol == "wba") && slots == 0) {
    throw ConfigError("slots must be >= 1");
  }
  if (protocol == "aba" || protocol == "wba") {
    for (PartyId p = 1; p <= params.n; ++p) {
      if (!bits.count(p)) throw ConfigError("bits: missing entry for party " + std::to_string(p));
    }
  }
  for (const auto& t : txs) {
    if (t.time < 0 || t.time >= net.horizon) throw ConfigError("txs.time outside horizon");
    for (PartyId p : t.targets) {
      if (p == 0 || p > params.n) throw ConfigError("txs.targets party out of range");
    }
  }
  for (const auto& ce : corrupt_at) {
    if (ce.party == 0 || ce.party > params.n) throw ConfigError("corrupt_at.party out of range");
    if (ce.time < 0) throw ConfigError("corrupt_at.time negative");
  }
  if (budget > params.n) throw ConfigError("adversary.budget exceeds n");
}

std::string ScenarioConfig::canonical_text() const {
  return to_json(*this).dump();
}

ScenarioConfig ScenarioConfig::from_text(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON");
  return parse_json(j);
}

}  // namespace nasmr
