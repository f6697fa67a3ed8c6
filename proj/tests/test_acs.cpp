#include <doctest.h>

#include "helpers.hpp"
#include "nasmr/acs.hpp"

using namespace nasmr;
using namespace nasmr::test;

namespace {

acs::Config unit_cfg() {
  return acs::Config{{4, 1, 1, 4, true}, 1, 1};
}

// Drives rbc_out / aba decisions directly for condition arithmetic tests.
acs::State seeded_state(const acs::Config& cfg) {
  acs::State st;
  st.started = true;
  st.rbcs.resize(cfg.params.n + 1);
  st.abas.resize(cfg.params.n + 1);
  st.rbc_out.resize(cfg.params.n + 1);
  return st;
}

void decide_aba(acs::State& st, std::uint32_t i, bool v) {
  st.abas[i].started = true;
  st.abas[i].decided = v;
}

ScenarioConfig sim_cfg() {
  ScenarioConfig cfg = base_config();
  cfg.protocol = "acs";
  cfg.net.mode = NetConfig::Mode::Async;
  cfg.net.horizon = 3000;
  return cfg;
}

const std::vector<std::string> kAcsChecks = {"acs-consistency", "acs-liveness",
                                             "acs-set-quality", "acs-quiescence",
                                             "acs-exit-range",  "aba-halt-safety"};

}  // namespace

TEST_CASE("conditions: C1 needs n - t_s matching broadcast outputs") {
  auto cfg = unit_cfg();
  auto st = seeded_state(cfg);
  const Bytes v = to_bytes("v");
  st.rbc_out[1] = v;
  st.rbc_out[2] = v;
  CHECK_FALSE(acs::conditions(cfg, st).c1.has_value());
  st.rbc_out[3] = v;
  auto c = acs::conditions(cfg, st);
  REQUIRE(c.c1.has_value());
  CHECK(*c.c1 == v);
}

TEST_CASE("conditions: C2 majority over S* with s = 3 is 2") {
  auto cfg = unit_cfg();
  auto st = seeded_state(cfg);
  const Bytes v = to_bytes("v");
  const Bytes w = to_bytes("w");
  decide_aba(st, 1, true);
  decide_aba(st, 2, true);
  decide_aba(st, 3, true);
  decide_aba(st, 4, false);  // S* = {1,2,3}, s = 3 >= n - t_a = 3
  st.rbc_out[1] = v;
  st.rbc_out[2] = v;
  st.rbc_out[3] = w;
  auto c = acs::conditions(cfg, st);
  CHECK_FALSE(c.c1.has_value());
  REQUIRE(c.c2.has_value());
  CHECK(*c.c2 == v);  // 2 >= floor(3/2)+1
  CHECK(c.c3);
}

TEST_CASE("conditions: C3 without a majority value") {
  acs::Config cfg{{4, 2, 1, 4, false}, 1, 1};  // t_a = 2 so s >= 2 suffices
  auto st = seeded_state(cfg);
  decide_aba(st, 1, true);
  decide_aba(st, 2, true);
  decide_aba(st, 3, false);
  decide_aba(st, 4, false);
  st.rbc_out[1] = to_bytes("v");
  st.rbc_out[2] = to_bytes("w");
  auto c = acs::conditions(cfg, st);
  CHECK_FALSE(c.c1.has_value());
  CHECK_FALSE(c.c2.has_value());  // 1 < floor(2/2)+1 = 2
  CHECK(c.c3);
}

TEST_CASE("conditions: C2/C3 require every ABA terminated") {
  auto cfg = unit_cfg();
  auto st = seeded_state(cfg);
  decide_aba(st, 1, true);
  decide_aba(st, 2, true);
  decide_aba(st, 3, true);
  st.rbc_out[1] = st.rbc_out[2] = st.rbc_out[3] = to_bytes("v");
  st.rbc_out[3] = to_bytes("v");
  // aba 4 still undecided: the C1 tally may hold but C2/C3 cannot.
  auto c = acs::conditions(cfg, st);
  CHECK_FALSE(c.c2.has_value());
  CHECK_FALSE(c.c3);
}

TEST_CASE("acs init: n broadcast instances, one with local input; double init throws") {
  auto cfg = unit_cfg();
  acs::State st;
  auto out = acs::init(cfg, st, Block::single(to_bytes("in")).encode_body());
  REQUIRE(out.broadcasts.size() == 1);  // our own sender instance's VALUE
  CHECK(out.broadcasts[0].kind() == MsgKind::RbcValue);
  CHECK(out.broadcasts[0].ctx.inst == 1);
  CHECK_THROWS_AS(acs::init(cfg, st, Bytes{}), ConfigError);
}

TEST_CASE("empty input block is legal") {
  auto cfg = unit_cfg();
  acs::State st;
  CHECK_NOTHROW(acs::init(cfg, st, Block{}.encode_body()));
}

TEST_CASE("unanimous input: all honest exit 1 with {v}, sync and async") {
  for (auto mode : {NetConfig::Mode::Sync, NetConfig::Mode::Async}) {
    ScenarioConfig cfg = sim_cfg();
    cfg.net.mode = mode;
    for (PartyId p = 1; p <= 4; ++p) cfg.inputs[p] = to_bytes("common");
    cfg.strategy = "crash";
    cfg.budget = 1;
    cfg.corrupt_at = {{0, 4}};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      cfg.net.seed = seed;
      auto run = run_scenario(cfg);
      auto parsed = parse_or_fail(run.transcript_text);
      auto rep = run_checks(parsed, cfg, {"acs-validity", "acs-consistency", "acs-liveness"});
      INFO("mode=" << (mode == NetConfig::Mode::Sync ? "sync" : "async") << " seed=" << seed);
      require_all_pass(rep);
      for (PartyId p = 1; p <= 3; ++p) {
        auto outs = outputs_of(parsed, p, "acs");
        REQUIRE(outs.size() == 1);
        auto set = acs::decode_bytes_set(outs[0]);
        REQUIRE(set.has_value());
        CHECK(set->size() == 1);
      }
    }
  }
}

TEST_CASE("mixed inputs, silent corrupted party, adversarial async scheduling") {
  ScenarioConfig cfg = sim_cfg();
  cfg.inputs = {{1, to_bytes("aa")}, {2, to_bytes("bb")}, {3, to_bytes("cc")}};
  cfg.strategy = "crash";
  cfg.budget = 1;
  cfg.corrupt_at = {{0, 4}};
  cfg.strategy_params["random_sched"] = 1;
  cfg.strategy_params["max_delay"] = 7;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    cfg.net.seed = seed;
    auto rep = run_and_check(cfg, kAcsChecks);
    INFO("seed=" << seed);
    require_all_pass(rep);
  }
}

TEST_CASE("equivocating corrupted broadcaster cannot split the agreed set") {
  ScenarioConfig cfg = sim_cfg();
  cfg.inputs = {{1, to_bytes("aa")}, {2, to_bytes("bb")}, {3, to_bytes("cc")}};
  cfg.strategy = "acs-equivocator";
  cfg.budget = 1;
  cfg.corrupt_at = {{0, 4}};
  cfg.strategy_params["random_sched"] = 1;
  cfg.strategy_params["max_delay"] = 6;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    cfg.net.seed = seed;
    auto rep = run_and_check(cfg, kAcsChecks);
    INFO("seed=" << seed);
    require_all_pass(rep);
  }
}

TEST_CASE("n=7 mixed inputs with two crashes") {
  ScenarioConfig cfg = sim_cfg();
  cfg.params.n = 7;
  cfg.params.t_s = 2;
  cfg.params.t_a = 2;
  for (PartyId p = 1; p <= 5; ++p) cfg.inputs[p] = to_bytes("in-" + std::to_string(p));
  cfg.strategy = "crash";
  cfg.budget = 2;
  cfg.corrupt_at = {{0, 6}, {0, 7}};
  cfg.strategy_params["random_sched"] = 1;
  cfg.strategy_params["max_delay"] = 5;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    cfg.net.seed = seed;
    auto rep = run_and_check(cfg, kAcsChecks);
    INFO("seed=" << seed);
    require_all_pass(rep);
  }
}
