#include "nasmr/runner.hpp"

#include "nasmr/adversary.hpp"
#include "nasmr/party.hpp"

namespace nasmr {

RunResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  auto strategy = make_strategy(cfg.strategy);
  if (!strategy) {
    std::string known;
    for (const auto& n : strategy_names()) known += n + " ";
    throw ConfigError("unknown strategy " + cfg.strategy + "; registered: " + known);
  }
  Simulation sim(cfg, party_factory(cfg.protocol), std::move(strategy));
  RunResult r;
  r.transcript_text = sim.run();
  r.transcript_digest = sha256(to_bytes(r.transcript_text));
  return r;
}

bool replay_matches(const std::string& transcript_text, std::string* note) {
  auto parsed = parse_transcript(transcript_text);
  if (!parsed) {
    if (note) *note = "unparsable transcript";
    return false;
  }
  ScenarioConfig cfg;
  try {
    cfg = ScenarioConfig::from_text(parsed->config_text);
  } catch (const ConfigError& e) {
    if (note) *note = std::string("bad embedded config: ") + e.what();
    return false;
  }
  RunResult again = run_scenario(cfg);
  if (again.transcript_text != transcript_text) {
    if (note) *note = "replay diverged";
    return false;
  }
  if (note) *note = "byte-identical";
  return true;
}

ScenarioConfig lower_bound_scenario(ScenarioConfig cfg) {
  cfg.protocol = "smr";
  cfg.strategy = "split-world";
  cfg.net.mode = NetConfig::Mode::Async;
  if (cfg.slots == 0) cfg.slots = 1;
  // m_b goes to camp b's buffers at time 0; the strategy feeds the virtual
  // copies itself.
  TxInjection inj0, inj1;
  inj0.time = 0;
  inj1.time = 0;
  for (PartyId p = 1; p <= cfg.params.n; ++p) {
    const int side = split_world_side(cfg.params, p);
    if (side == 0) inj0.targets.push_back(p);
    if (side == 1) inj1.targets.push_back(p);
  }
  inj0.payload = lower_bound_payload(cfg.net.seed, 0);
  inj1.payload = lower_bound_payload(cfg.net.seed, 1);
  cfg.txs.clear();
  cfg.txs.push_back(inj0);
  cfg.txs.push_back(inj1);
  if (cfg.budget == 0) cfg.budget = cfg.params.t_a;
  cfg.checks = {"budget", "lb-violation"};
  return cfg;
}

DemoResult demo_lower_bound(ScenarioConfig cfg) {
  if (cfg.params.t_a + 2 * cfg.params.t_s < cfg.params.n) {
    throw ConfigError("demo refused: t_a + 2*t_s < n holds, the experiment would be vacuous");
  }
  if (cfg.params.enforce_bound) {
    throw ConfigError("demo requires enforce_bound cleared");
  }
  ScenarioConfig demo = lower_bound_scenario(std::move(cfg));
  DemoResult out;
  out.run = run_scenario(demo);
  auto parsed = parse_transcript(out.run.transcript_text);
  if (!parsed) throw std::logic_error("demo produced unparsable transcript");
  out.report = run_checks(*parsed, demo);
  return out;
}

}  // namespace nasmr
