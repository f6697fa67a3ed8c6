#pragma once

#include <map>
#include <optional>
#include <set>

#include "nasmr/message.hpp"
#include "nasmr/types.hpp"

namespace nasmr::rbc {

// Bracha-style reliable broadcast parameterized by t_s: echo quorum n - t_s,
// ready amplification t_s + 1, delivery n - t_s.
struct Config {
  ProtocolParams params;
  PartyId self = 0;
  PartyId sender = 0;
  Slot slot = 1;  // instance coordinates are (slot, sender)
};

struct State {
  std::map<Digest, std::set<PartyId>> echoes;
  std::map<Digest, std::set<PartyId>> readies;
  std::map<Digest, Bytes> values;  // digest -> value bytes first seen
  bool value_delivered = false;    // sender's value accepted (first only)
  bool sent_echo = false;
  bool sent_ready = false;
  std::optional<Bytes> output;
  bool terminated = false;
  std::uint64_t dropped = 0;
};

struct Out {
  std::vector<ProtocolMessage> broadcasts;
  bool output_now = false;
};

// Sender broadcasts its value to all parties (including itself); others emit
// nothing. Throws ConfigError if input presence does not match the role.
Out init(const Config& cfg, State& st, const std::optional<Bytes>& input);

Out handle(const Config& cfg, State& st, PartyId from, const ProtocolMessage& m);

}  // namespace nasmr::rbc
