#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nasmr/simnet.hpp"

namespace nasmr {

// Registered adversary strategies:
//   benign            deliver at send+1, no interference
//   crash             corrupted parties send nothing (aliases: abort,
//                     status-withholder)
//   async-max-delay   every message delayed by max_delay (default 8)
//   randomized        per-message random delay in [1, max_delay] + random
//                     tie-break priority
//   rbc-equivocator   corrupted sender splits VALUE/ECHO/READY between two
//                     halves of the parties
//   rbc-byzantine     corrupted non-senders inject conflicting echo/ready
//   propose-equivocator  corrupted proposer sends two different correctly
//                     formed Propose messages to two halves
//   leader-assassin   adaptively corrupts each revealed leader
//   equivocator       SMR: corrupted parties equivocate signed buffers and
//                     their ACS broadcast value
//   split-world       the threshold-violation experiment: blocked camps plus
//                     duplicated corrupted parties
// All strategies honor scheduling params (max_delay, random_sched, perm_k,
// perm_index).
std::unique_ptr<Strategy> make_strategy(const std::string& name);
std::vector<std::string> strategy_names();
bool strategy_known(const std::string& name);

// Split-world partition helper: S0 = first t_s parties, S1 = next t_s,
// Sa = rest. Returns 0, 1, or -1 (Sa).
int split_world_side(const ProtocolParams& params, PartyId p);

// The m_b payloads of the lower-bound experiment, drawn from the scenario
// seed (32 bytes each).
Bytes lower_bound_payload(std::uint64_t seed, int side);

}  // namespace nasmr
