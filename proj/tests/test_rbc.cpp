#include <doctest.h>

#include "helpers.hpp"
#include "nasmr/rbc.hpp"

using namespace nasmr;
using namespace nasmr::test;

namespace {

ProtocolMessage rbc_msg(PartyId sender, MsgBody body) {
  ProtocolMessage m;
  m.ctx = MsgContext{1, sender, 0};
  m.body = std::move(body);
  return m;
}

ScenarioConfig rbc_cfg() {
  ScenarioConfig cfg = base_config();
  cfg.protocol = "rbc";
  cfg.rbc_sender = 1;
  cfg.inputs[1] = to_bytes("v-star");
  return cfg;
}

}  // namespace

TEST_CASE("init: sender broadcasts its value, others stay silent") {
  rbc::Config cfg{{4, 1, 1, 4, true}, 1, 1, 1};
  rbc::State st;
  auto out = rbc::init(cfg, st, to_bytes("v"));
  REQUIRE(out.broadcasts.size() == 1);
  CHECK(out.broadcasts[0].kind() == MsgKind::RbcValue);

  rbc::Config other{{4, 1, 1, 4, true}, 2, 1, 1};
  rbc::State st2;
  CHECK(rbc::init(other, st2, std::nullopt).broadcasts.empty());

  rbc::State st3;
  CHECK_THROWS_AS(rbc::init(other, st3, to_bytes("x")), ConfigError);  // non-sender input
  rbc::State st4;
  CHECK_THROWS_AS(rbc::init(cfg, st4, std::nullopt), ConfigError);  // sender without input
}

TEST_CASE("quorums for n=4, t_s=1: echo at 3, amplify at 2, deliver at 3") {
  rbc::Config cfg{{4, 1, 1, 4, true}, 2, 1, 1};
  rbc::State st;
  const Bytes v = to_bytes("v");

  // Sender's value triggers one echo.
  auto out = rbc::handle(cfg, st, 1, rbc_msg(1, RbcValueMsg{v}));
  REQUIRE(out.broadcasts.size() == 1);
  CHECK(out.broadcasts[0].kind() == MsgKind::RbcEcho);

  // A second (different) value from the sender is ignored.
  out = rbc::handle(cfg, st, 1, rbc_msg(1, RbcValueMsg{to_bytes("other")}));
  CHECK(out.broadcasts.empty());

  // Echoes from 2 parties: not yet n - t_s = 3.
  rbc::handle(cfg, st, 1, rbc_msg(1, RbcEchoMsg{v}));
  out = rbc::handle(cfg, st, 3, rbc_msg(1, RbcEchoMsg{v}));
  CHECK(out.broadcasts.empty());
  out = rbc::handle(cfg, st, 4, rbc_msg(1, RbcEchoMsg{v}));
  REQUIRE(out.broadcasts.size() == 1);
  CHECK(out.broadcasts[0].kind() == MsgKind::RbcReady);

  // Ready quorum n - t_s = 3 delivers.
  rbc::handle(cfg, st, 1, rbc_msg(1, RbcReadyMsg{v}));
  rbc::handle(cfg, st, 3, rbc_msg(1, RbcReadyMsg{v}));
  out = rbc::handle(cfg, st, 4, rbc_msg(1, RbcReadyMsg{v}));
  CHECK(out.output_now);
  CHECK(st.output == v);
  CHECK(st.terminated);

  // Terminated instances drop traffic.
  out = rbc::handle(cfg, st, 2, rbc_msg(1, RbcEchoMsg{v}));
  CHECK(out.broadcasts.empty());
  CHECK(st.dropped > 0);
}

TEST_CASE("ready amplification from t_s + 1 distinct readies") {
  rbc::Config cfg{{4, 1, 1, 4, true}, 2, 1, 1};
  rbc::State st;
  const Bytes v = to_bytes("v");
  auto out = rbc::handle(cfg, st, 3, rbc_msg(1, RbcReadyMsg{v}));
  CHECK(out.broadcasts.empty());
  out = rbc::handle(cfg, st, 4, rbc_msg(1, RbcReadyMsg{v}));
  REQUIRE(out.broadcasts.size() == 1);
  CHECK(out.broadcasts[0].kind() == MsgKind::RbcReady);
  // Echo quorum later must not re-send the ready.
  rbc::handle(cfg, st, 1, rbc_msg(1, RbcEchoMsg{v}));
  rbc::handle(cfg, st, 3, rbc_msg(1, RbcEchoMsg{v}));
  out = rbc::handle(cfg, st, 4, rbc_msg(1, RbcEchoMsg{v}));
  CHECK(out.broadcasts.empty());
}

TEST_CASE("distinct-party counting: duplicate echoes do not advance the tally") {
  rbc::Config cfg{{4, 1, 1, 4, true}, 2, 1, 1};
  rbc::State st;
  const Bytes v = to_bytes("v");
  rbc::handle(cfg, st, 3, rbc_msg(1, RbcEchoMsg{v}));
  rbc::handle(cfg, st, 3, rbc_msg(1, RbcEchoMsg{v}));
  auto out = rbc::handle(cfg, st, 3, rbc_msg(1, RbcEchoMsg{v}));
  CHECK(out.broadcasts.empty());
  CHECK_FALSE(st.sent_ready);
}

TEST_CASE("all-honest sync: every party outputs the sender's value within 3 hops") {
  ScenarioConfig cfg = rbc_cfg();
  auto run = run_scenario(cfg);
  auto parsed = parse_or_fail(run.transcript_text);
  require_all_pass(run_checks(parsed, cfg, {"rbc-validity", "rbc-consistency", "sync-bound"}));
  for (const auto& r : parsed.records) {
    if (r.kind == RecordKind::Output) CHECK(r.time <= 3);  // benign delay is 1 per hop
  }
}

TEST_CASE("honest sender with t_s crash or byzantine faults, sync, n=4 and n=7") {
  for (auto [n, ts, ta] : {std::tuple<int, int, int>{4, 1, 1}, {7, 2, 2}}) {
    for (const char* strat : {"crash", "rbc-byzantine"}) {
      ScenarioConfig cfg = rbc_cfg();
      cfg.params.n = n;
      cfg.params.t_s = ts;
      cfg.params.t_a = ta;
      cfg.strategy = strat;
      cfg.budget = ts;
      for (int i = 0; i < ts; ++i) {
        cfg.corrupt_at.push_back({0, static_cast<PartyId>(n - i)});
      }
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        cfg.net.seed = seed;
        auto rep = run_and_check(cfg, {"rbc-validity", "rbc-consistency", "rbc-echo-once"});
        INFO("n=" << n << " strat=" << strat << " seed=" << seed);
        require_all_pass(rep);
      }
    }
  }
}

TEST_CASE("equivocating sender, async: no two honest parties ever disagree") {
  ScenarioConfig cfg = rbc_cfg();
  cfg.net.mode = NetConfig::Mode::Async;
  cfg.net.horizon = 600;
  cfg.strategy = "rbc-equivocator";
  cfg.budget = 1;
  cfg.rbc_sender = 4;
  cfg.inputs[4] = to_bytes("v-star");
  cfg.corrupt_at = {{0, 4}};
  cfg.strategy_params["random_sched"] = 1;
  cfg.strategy_params["max_delay"] = 9;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    cfg.net.seed = seed;
    auto rep = run_and_check(cfg, {"rbc-consistency", "rbc-echo-once"});
    INFO("seed=" << seed);
    require_all_pass(rep);
  }
}

TEST_CASE("equivocating sender: exhaustive delivery orders of the 3 value messages") {
  ScenarioConfig cfg = rbc_cfg();
  cfg.net.mode = NetConfig::Mode::Async;
  cfg.net.horizon = 600;
  cfg.strategy = "rbc-equivocator";
  cfg.budget = 1;
  cfg.rbc_sender = 4;
  cfg.inputs[4] = to_bytes("v-star");
  cfg.corrupt_at = {{0, 4}};
  cfg.strategy_params["values_only"] = 1;
  cfg.strategy_params["perm_k"] = 3;
  for (int perm = 0; perm < 6; ++perm) {
    cfg.strategy_params["perm_index"] = perm;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      cfg.net.seed = seed;
      auto rep = run_and_check(cfg, {"rbc-consistency"});
      INFO("perm=" << perm << " seed=" << seed);
      require_all_pass(rep);
    }
  }
}
