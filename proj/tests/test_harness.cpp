#include <doctest.h>

#include "helpers.hpp"
#include "nasmr/adversary.hpp"

using namespace nasmr;
using namespace nasmr::test;

TEST_CASE("config json round-trips canonically") {
  ScenarioConfig cfg = base_config();
  cfg.protocol = "smr";
  cfg.txs.push_back({3, {1, 2}, to_bytes("t")});
  cfg.corrupt_at.push_back({0, 4});
  cfg.budget = 1;
  cfg.strategy_params["max_delay"] = 5;
  cfg.checks = {"smr-consistency"};
  std::string text = cfg.canonical_text();
  ScenarioConfig back = ScenarioConfig::from_text(text);
  CHECK(back.canonical_text() == text);
}

TEST_CASE("malformed configs name the offending field") {
  auto expect_error = [](const std::string& json, const std::string& needle) {
    try {
      auto cfg = ScenarioConfig::from_text(json);
      cfg.validate();
      FAIL("expected ConfigError for " << needle);
    } catch (const ConfigError& e) {
      INFO(e.what());
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error("{", "JSON");
  expect_error(R"({"net":{"mode":"sync"}})", "params");
  expect_error(R"({"params":{"n":4,"t_a":2,"t_s":1},"net":{"mode":"sync"}})", "t_a");
  expect_error(R"({"params":{"n":4,"t_a":1,"t_s":2},"net":{"mode":"sync"}})", "t_a + 2*t_s");
  expect_error(R"({"params":{"n":4,"t_a":1,"t_s":1},"net":{"mode":"updown"}})", "net.mode");
  expect_error(
      R"({"params":{"n":4,"t_a":1,"t_s":1},"net":{"mode":"sync"},"protocol":"quux"})",
      "protocol");
  expect_error(
      R"({"params":{"n":4,"t_a":1,"t_s":1},"net":{"mode":"async"},"protocol":"bla"})",
      "sync");
  expect_error(
      R"({"params":{"n":4,"t_a":1,"t_s":1},"net":{"mode":"sync"},"protocol":"aba"})",
      "bits");
}

TEST_CASE("hand-corrupted transcript fails the consistency check at the edit") {
  ScenarioConfig cfg = base_config();
  cfg.protocol = "smr";
  cfg.slots = 1;
  cfg.net.horizon = cfg.slot_period() + 300;
  auto run = run_scenario(cfg);

  // Flip a hex digit inside the first smr-block output record's payload.
  std::string text = run.transcript_text;
  auto pos = text.find("output\t1\t0\t");
  REQUIRE(pos != std::string::npos);
  const auto payload_start = pos + std::string("output\t1\t0\t").size();
  REQUIRE(text[payload_start] != '\t');
  text[payload_start + 2] = text[payload_start + 2] == 'a' ? 'b' : 'a';

  auto parsed = parse_or_fail(text);
  auto rep = run_checks(parsed, cfg, {"smr-consistency"});
  REQUIRE(rep.results.size() == 1);
  CHECK_FALSE(rep.results[0].pass);
  CHECK(rep.results[0].first_violation_seq.has_value());
}

TEST_CASE("replay detects a tampered transcript") {
  ScenarioConfig cfg = base_config();
  cfg.protocol = "rbc";
  cfg.inputs[1] = to_bytes("v");
  auto run = run_scenario(cfg);
  CHECK(replay_matches(run.transcript_text));
  std::string text = run.transcript_text;
  text.back() = text.back() == '0' ? '1' : '0';
  CHECK_FALSE(replay_matches(text));
}

TEST_CASE("check report renders line-delimited records") {
  ScenarioConfig cfg = base_config();
  cfg.protocol = "rbc";
  cfg.inputs[1] = to_bytes("v");
  auto rep = run_and_check(cfg);
  std::string text = rep.render();
  CHECK(text.find("check\tsync-bound\tpass") != std::string::npos);
  CHECK(text.find("metric\t") != std::string::npos);
  CHECK(rep.all_pass());
}

TEST_CASE("lower-bound demo: n=4, t_s=2, t_a=0 splits the slot-1 log") {
  ScenarioConfig cfg;
  cfg.params = {4, 0, 2, 2, false};
  cfg.net.mode = NetConfig::Mode::Async;
  cfg.net.delta = 2;
  cfg.net.horizon = 900;
  cfg.protocol = "smr";
  cfg.slots = 1;
  cfg.budget = 0;
  int violations = 0;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    cfg.net.seed = seed;
    auto demo = demo_lower_bound(cfg);
    if (demo.report.all_pass()) ++violations;
  }
  CHECK(violations == 25);
}

TEST_CASE("lower-bound demo: n=5, t_s=2, t_a=1 with a duplicated corrupted party") {
  ScenarioConfig cfg;
  cfg.params = {5, 1, 2, 2, false};
  cfg.net.mode = NetConfig::Mode::Async;
  cfg.net.delta = 2;
  cfg.net.horizon = 1200;
  cfg.protocol = "smr";
  cfg.slots = 1;
  cfg.budget = 1;
  int violations = 0;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    cfg.net.seed = seed;
    auto demo = demo_lower_bound(cfg);
    if (demo.report.all_pass()) ++violations;
  }
  CHECK(violations == 25);
}

TEST_CASE("lower-bound demo refuses bound-respecting configs") {
  ScenarioConfig cfg = base_config();  // n=4, t_a=1, t_s=1: bound holds
  cfg.protocol = "smr";
  CHECK_THROWS_AS(demo_lower_bound(cfg), ConfigError);
}

TEST_CASE("split-world strategy against a bound-respecting config: no violation") {
  ScenarioConfig cfg = base_config();
  cfg.net.mode = NetConfig::Mode::Async;
  cfg.protocol = "smr";
  cfg.slots = 1;
  cfg.net.horizon = cfg.slot_period() + 600;
  cfg.budget = cfg.params.t_a;
  ScenarioConfig demo = lower_bound_scenario(cfg);
  demo.checks.clear();
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    demo.net.seed = seed;
    auto run = run_scenario(demo);
    auto parsed = parse_or_fail(run.transcript_text);
    auto rep = run_checks(parsed, demo, {"smr-consistency", "budget"});
    INFO("seed=" << seed);
    require_all_pass(rep);
  }
}

TEST_CASE("strategy registry") {
  for (const auto& name : strategy_names()) {
    CHECK(make_strategy(name) != nullptr);
  }
  CHECK(make_strategy("bogus") == nullptr);
}

TEST_CASE("default check sets cover each protocol") {
  for (const char* proto : {"rbc", "aba", "acs", "gc", "bla", "smr", "wba"}) {
    auto checks = default_checks(proto, NetConfig::Mode::Sync);
    CHECK(!checks.empty());
    for (const auto& c : checks) {
      INFO(proto << " -> " << c);
      CHECK(check_known(c));
    }
  }
}
