#include <doctest.h>

#include "helpers.hpp"
#include "nasmr/smr.hpp"

using namespace nasmr;
using namespace nasmr::test;

namespace {

ScenarioConfig smr_cfg(std::uint64_t slots = 2) {
  ScenarioConfig cfg = base_config();
  cfg.protocol = "smr";
  cfg.slots = slots;
  cfg.net.horizon = cfg.slot_period() * static_cast<Time>(slots) + 400;
  return cfg;
}

const std::vector<std::string> kSyncChecks = {"smr-consistency", "smr-completeness",
                                              "smr-liveness", "smr-epoch-discipline",
                                              "sync-bound"};

}  // namespace

TEST_CASE("slot timetable: T_k = (delta + 5*kappa*delta)*(k-1)") {
  ScenarioConfig cfg = smr_cfg();
  CHECK(cfg.slot_period() == cfg.net.delta + 5 * static_cast<Time>(cfg.params.kappa) * cfg.net.delta);
  auto run = run_scenario(cfg);
  auto parsed = parse_or_fail(run.transcript_text);
  for (const auto& r : parsed.records) {
    if (r.kind != RecordKind::Epoch) continue;
    auto slot = std::stoull(note_field(r.note, "slot").value_or("0"));
    CHECK(r.time == cfg.slot_period() * static_cast<Time>(slot - 1));
  }
}

TEST_CASE("all-honest sync: identical blocks, liveness, epoch discipline") {
  ScenarioConfig cfg = smr_cfg(3);
  cfg.txs.push_back({0, {}, to_bytes("early")});
  cfg.txs.push_back({cfg.slot_period() + 1, {}, to_bytes("mid")});
  auto rep = run_and_check(cfg, kSyncChecks);
  require_all_pass(rep);
}

TEST_CASE("a tx held by all honest parties before slot 1 lands in block 1") {
  ScenarioConfig cfg = smr_cfg(1);
  cfg.txs.push_back({0, {}, to_bytes("tx0")});
  auto run = run_scenario(cfg);
  auto parsed = parse_or_fail(run.transcript_text);
  const Digest txid = Transaction::make(to_bytes("tx0")).id;
  for (PartyId p = 1; p <= 4; ++p) {
    auto outs = outputs_of(parsed, p, "smr-block");
    REQUIRE(outs.size() == 1);
    enc::Reader r(outs[0]);
    auto blk = Block::decode_body(r);
    REQUIRE(blk.has_value());
    CHECK(blk->contains(txid));
  }
}

TEST_CASE("mid-slot injection is excluded from the running slot's snapshot") {
  ScenarioConfig cfg = smr_cfg(2);
  cfg.txs.push_back({1, {}, to_bytes("late")});  // after the slot-1 snapshot at t=0
  auto run = run_scenario(cfg);
  auto parsed = parse_or_fail(run.transcript_text);
  const Digest txid = Transaction::make(to_bytes("late")).id;
  for (PartyId p = 1; p <= 4; ++p) {
    auto outs = outputs_of(parsed, p, "smr-block");
    REQUIRE(outs.size() == 2);
    enc::Reader r1(outs[0]);
    auto blk1 = Block::decode_body(r1);
    REQUIRE(blk1.has_value());
    CHECK_FALSE(blk1->contains(txid));  // snapshot precedes the injection
    enc::Reader r2(outs[1]);
    auto blk2 = Block::decode_body(r2);
    REQUIRE(blk2.has_value());
    CHECK(blk2->contains(txid));
  }
  require_all_pass(run_checks(parsed, cfg, kSyncChecks));
}

TEST_CASE("duplicate tx injections collapse to one buffer entry") {
  ScenarioConfig cfg = smr_cfg(1);
  cfg.txs.push_back({0, {}, to_bytes("dup")});
  cfg.txs.push_back({0, {}, to_bytes("dup")});
  auto run = run_scenario(cfg);
  auto parsed = parse_or_fail(run.transcript_text);
  auto outs = outputs_of(parsed, 1, "smr-block");
  REQUIRE(outs.size() == 1);
  enc::Reader r(outs[0]);
  auto blk = Block::decode_body(r);
  REQUIRE(blk.has_value());
  CHECK(blk->size() == 1);
}

TEST_CASE("sync with one Byzantine party: crash, equivocator, leader-assassin") {
  for (const char* strat : {"crash", "equivocator", "leader-assassin"}) {
    ScenarioConfig cfg = smr_cfg(2);
    cfg.strategy = strat;
    cfg.budget = 1;
    if (std::string(strat) != "leader-assassin") cfg.corrupt_at = {{0, 4}};
    cfg.txs.push_back({0, {}, to_bytes("t0")});
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      cfg.net.seed = seed;
      auto rep = run_and_check(
          cfg, {"smr-consistency", "smr-completeness", "smr-liveness", "smr-epoch-discipline"});
      INFO("strategy=" << strat << " seed=" << seed);
      require_all_pass(rep);
    }
  }
}

TEST_CASE("async with max-delay scheduling: consistency and liveness by horizon") {
  ScenarioConfig cfg = smr_cfg(2);
  cfg.net.mode = NetConfig::Mode::Async;
  cfg.net.horizon = cfg.slot_period() * 2 + 2500;
  cfg.strategy = "async-max-delay";
  cfg.strategy_params["max_delay"] = 6;
  cfg.budget = 1;
  cfg.corrupt_at = {{0, 2}};
  cfg.txs.push_back({0, {}, to_bytes("t0")});
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    cfg.net.seed = seed;
    auto rep = run_and_check(cfg, {"smr-consistency", "smr-completeness", "smr-liveness",
                                   "smr-epoch-discipline"});
    INFO("seed=" << seed);
    require_all_pass(rep);
  }
}

TEST_CASE("async randomized byzantine equivocator keeps blocks consistent") {
  ScenarioConfig cfg = smr_cfg(2);
  cfg.net.mode = NetConfig::Mode::Async;
  cfg.net.horizon = cfg.slot_period() * 2 + 2500;
  cfg.strategy = "equivocator";
  cfg.strategy_params["random_sched"] = 1;
  cfg.strategy_params["max_delay"] = 5;
  cfg.budget = 1;
  cfg.corrupt_at = {{0, 3}};
  cfg.txs.push_back({0, {}, to_bytes("t0")});
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    cfg.net.seed = seed;
    auto rep = run_and_check(cfg, {"smr-consistency", "smr-liveness", "smr-epoch-discipline"});
    INFO("seed=" << seed);
    require_all_pass(rep);
  }
}

TEST_CASE("wba: sync unanimity outputs the common bit after slot 1") {
  ScenarioConfig cfg = smr_cfg(2);
  cfg.protocol = "wba";
  cfg.bits = {{1, true}, {2, true}, {3, true}, {4, true}};
  auto run = run_scenario(cfg);
  auto parsed = parse_or_fail(run.transcript_text);
  require_all_pass(run_checks(parsed, cfg, {"wba-agreement", "wba-validity", "wba-termination"}));
  // Output fires on slot 1's block.
  Time slot2_start = cfg.net.delta + cfg.slot_period();
  for (PartyId p = 1; p <= 4; ++p) {
    auto outs = outputs_of(parsed, p, "wba");
    REQUIRE(outs.size() == 1);
    CHECK(outs[0] == Bytes{1});
  }
  for (const auto& r : parsed.records) {
    if (r.kind == RecordKind::Output && r.note == "wba") {
      CHECK(r.time <= slot2_start + cfg.slot_period());
    }
  }
}

TEST_CASE("wba majority arithmetic: V = {1,1,0} with n - t_s = 3 outputs 1") {
  ScenarioConfig cfg = smr_cfg(2);
  cfg.protocol = "wba";
  cfg.bits = {{1, true}, {2, true}, {3, false}, {4, false}};
  cfg.strategy = "crash";
  cfg.budget = 1;
  cfg.corrupt_at = {{0, 4}};  // V can only collect (1,P1), (1,P2), (0,P3)
  auto run = run_scenario(cfg);
  auto parsed = parse_or_fail(run.transcript_text);
  require_all_pass(run_checks(parsed, cfg, {"wba-agreement", "wba-termination"}));
  for (PartyId p = 1; p <= 3; ++p) {
    auto outs = outputs_of(parsed, p, "wba");
    REQUIRE(outs.size() == 1);
    CHECK(outs[0] == Bytes{1});
  }
}

TEST_CASE("wba async with unanimous honest inputs agrees on that value") {
  ScenarioConfig cfg = smr_cfg(3);
  cfg.protocol = "wba";
  cfg.net.mode = NetConfig::Mode::Async;
  cfg.net.horizon = cfg.slot_period() * 3 + 2500;
  cfg.bits = {{1, false}, {2, false}, {3, false}, {4, true}};
  cfg.strategy = "crash";
  cfg.budget = 1;
  cfg.corrupt_at = {{0, 4}};
  cfg.strategy_params["random_sched"] = 1;
  cfg.strategy_params["max_delay"] = 5;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    cfg.net.seed = seed;
    auto run = run_scenario(cfg);
    auto parsed = parse_or_fail(run.transcript_text);
    require_all_pass(run_checks(parsed, cfg, {"wba-agreement", "wba-validity"}));
    for (PartyId p = 1; p <= 3; ++p) {
      auto outs = outputs_of(parsed, p, "wba");
      if (!outs.empty()) CHECK(outs[0] == Bytes{0});
    }
  }
}

TEST_CASE("slot overlap: slot k+1 starts while slot k ACS may still run") {
  // Async: delay everything so slot-1 ACS outlives the slot-2 start; blocks
  // must still come out consistent.
  ScenarioConfig cfg = smr_cfg(2);
  cfg.net.mode = NetConfig::Mode::Async;
  cfg.net.horizon = cfg.slot_period() * 2 + 3000;
  cfg.strategy = "async-max-delay";
  cfg.strategy_params["max_delay"] = 12;
  auto run = run_scenario(cfg);
  auto parsed = parse_or_fail(run.transcript_text);
  require_all_pass(
      run_checks(parsed, cfg, {"smr-consistency", "smr-completeness", "smr-epoch-discipline"}));
}
