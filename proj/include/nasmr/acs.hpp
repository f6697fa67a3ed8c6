#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nasmr/aba.hpp"
#include "nasmr/rbc.hpp"

namespace nasmr::acs {

// n parallel reliable broadcasts + n ABAs with exits:
//   C1(v): at least n - t_s broadcasts output v            -> output {v}
//   C2(v): s >= n - t_a, all ABAs terminated, majority of
//          {bb_i : i in S*} output v                       -> output {v}
//   C3:    s >= n - t_a, all ABAs terminated, all
//          {bb_i : i in S*} terminated                     -> output {v'_i}
// evaluated in that order after every event. After output, broadcasts keep
// running; once C1 holds, every ABA is halted.
struct Config {
  ProtocolParams params;
  PartyId self = 0;
  Slot slot = 1;
};

struct State {
  Bytes input;
  bool started = false;
  std::vector<rbc::State> rbcs;              // [1..n]
  std::vector<aba::State> abas;              // [1..n]
  std::vector<std::optional<Bytes>> rbc_out;  // v'_i
  bool zero_inputs_started = false;
  bool c1_latched = false;
  std::optional<std::vector<Bytes>> output;  // sorted unique values
  int exit_taken = 0;
};

struct CoinReq {
  std::uint64_t index = 0;
  std::uint64_t round = 0;
};

struct Out {
  std::vector<ProtocolMessage> broadcasts;
  std::vector<CoinReq> coin_requests;
  bool output_now = false;
  std::vector<std::string> notes;
};

struct Conditions {
  std::optional<Bytes> c1;
  std::optional<Bytes> c2;
  bool c3 = false;
};

Out init(const Config& cfg, State& st, Bytes input);
Out handle(const Config& cfg, State& st, PartyId from, const ProtocolMessage& m);
Out on_coin(const Config& cfg, State& st, std::uint64_t index, std::uint64_t round, bool value);

// Pure evaluation of the exit conditions on the current state.
Conditions conditions(const Config& cfg, const State& st);

// Canonical encoding of an output value set (count + sorted length-prefixed
// elements under a set tag).
Bytes encode_bytes_set(const std::vector<Bytes>& values);
std::optional<std::vector<Bytes>> decode_bytes_set(const Bytes& body);

// One char per instance: d(ecided) h(alted) r(unning) u(nstarted).
std::string aba_status_string(const State& st, std::uint32_t n);

}  // namespace nasmr::acs
