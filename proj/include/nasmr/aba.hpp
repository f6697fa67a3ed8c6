#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>

#include "nasmr/message.hpp"
#include "nasmr/types.hpp"

namespace nasmr::aba {

// Binary asynchronous BA, t_a-secure for t_a < n/3, round-based with an ideal
// common coin. Per round r: EST relayed at t_a+1, bin_values at 2*t_a+1, AUX
// quorum n - t_a, then the coin decides. A party that decides broadcasts
// DONE(b) and halts; a DONE counts as EST and AUX for every round at every
// receiver, and t_a+1 DONEs on b trigger immediate adoption.
struct Config {
  ProtocolParams params;
  PartyId self = 0;
  Slot slot = 1;
  std::uint64_t index = 1;  // instance index within the slot
};

struct RoundState {
  std::array<std::set<PartyId>, 2> est_senders;
  std::array<bool, 2> sent_est{false, false};
  std::array<bool, 2> bin_values{false, false};
  std::map<PartyId, bool> aux_votes;  // first AUX per sender
  bool sent_aux = false;
  bool coin_requested = false;
  std::optional<bool> coin;
};

struct State {
  bool started = false;
  bool halted = false;
  std::optional<bool> est;
  std::uint64_t round = 1;
  std::map<std::uint64_t, RoundState> rounds;
  std::map<PartyId, bool> done_votes;  // first DONE per sender
  bool sent_done = false;
  std::optional<bool> decided;
  std::uint64_t decided_round = 0;
  std::uint64_t dropped = 0;
};

struct Out {
  std::vector<ProtocolMessage> broadcasts;
  std::vector<std::uint64_t> coin_requests;  // rounds
  bool decided_now = false;
};

Out init(const Config& cfg, State& st, bool input);
Out handle(const Config& cfg, State& st, PartyId from, const ProtocolMessage& m);
Out on_coin(const Config& cfg, State& st, std::uint64_t round, bool value);
// External halt: no further outbound, inbound dropped; a decision is kept.
void halt(State& st);

}  // namespace nasmr::aba
