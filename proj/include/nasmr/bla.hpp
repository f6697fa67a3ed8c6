#pragma once

#include <map>
#include <optional>
#include <set>

#include "nasmr/validity.hpp"

namespace nasmr::bla {

// One GC iteration spans 5 delta-steps: Propose runs over [0, 3d], Commit at
// 3d (on the leader reveal), certificate + Notify at 4d, grades at 5d.
inline constexpr int kStepsPerIteration = 5;

// ---- Propose (designated proposer P*, quorum ceil((n+1)/2)) ----

struct ProposeState {
  std::map<PartyId, StatusMsg> statuses;    // proposer role: first correctly formed per signer
  std::optional<ProposeMsg> from_proposer;  // first correctly formed, received from P*
  Bytes from_proposer_enc;
  std::map<PartyId, Bytes> relays;  // first correctly formed relay per relayer
  bool proposer_sent = false;
  bool relayed = false;
  bool output_set = false;          // set => output below is final (nullopt = bottom)
  std::optional<Pair> output;
  bool closed = false;              // after the 3d step
};

// ---- GC (graded consensus, parameterized by iteration k) ----

struct GcOutput {
  std::optional<Pair> pair;  // nullopt for grade 0
  Certificate cert;
  int grade = 0;
};

struct GcConfig {
  ProtocolParams params;
  PartyId self = 0;
  Slot slot = 1;
  std::uint64_t k = 1;
  std::uint64_t session = 0;
  crypto::PartySigner signer;
  const crypto::Ledger* ledger = nullptr;

  crypto::Verifier verifier() const { return crypto::Verifier{ledger, session, slot}; }
};

struct GcState {
  Vote input;
  std::vector<ProposeState> props;  // [1..n]
  // Relayed Propose messages repeat verbatim across senders; validation is
  // memoized by encoding digest.
  std::map<Digest, bool> propose_cache;
  bool leader_requested = false;
  std::optional<PartyId> leader;
  bool commit_sent = false;
  std::map<Digest, std::map<PartyId, CommitMsg>> commits;  // pair digest -> signer
  std::map<Digest, Pair> commit_pairs;
  std::map<PartyId, NotifyMsg> notifies;  // correctly formed, first per sender
  std::optional<GcOutput> output;
  bool terminated = false;
  bool anomaly_no_leader = false;
};

struct GcOut {
  std::vector<std::pair<PartyId, ProtocolMessage>> sends;
  std::vector<ProtocolMessage> broadcasts;
  bool request_leader = false;
  bool output_now = false;
};

GcOut gc_start(const GcConfig& cfg, GcState& st, Vote input);
// step 1..5 at local times delta..5*delta.
GcOut gc_step(const GcConfig& cfg, GcState& st, int step);
GcOut gc_handle(const GcConfig& cfg, GcState& st, PartyId from, const ProtocolMessage& m);
GcOut gc_on_leader(const GcConfig& cfg, GcState& st, PartyId leader);

// ---- BLA (kappa iterations of GC) ----

struct BlaConfig {
  ProtocolParams params;
  PartyId self = 0;
  Slot slot = 1;
  std::uint64_t session = 0;
  crypto::PartySigner signer;
  const crypto::Ledger* ledger = nullptr;
};

struct BlaState {
  Pair input;
  Vote current;  // (k*, B*, Sigma*, C*)
  std::uint64_t iter = 0;
  GcState gc;
  std::optional<Pair> output;  // write-once; the party keeps iterating
  std::uint64_t output_iter = 0;
  bool finished = false;
  std::vector<int> grades;  // per completed iteration, for metrics
};

struct BlaOut {
  std::vector<std::pair<PartyId, ProtocolMessage>> sends;
  std::vector<ProtocolMessage> broadcasts;
  bool request_leader = false;  // for (slot, iter)
  bool output_now = false;
};

BlaOut bla_start(const BlaConfig& cfg, BlaState& st, Pair input);
// u = 1..5*kappa: the step at local time u*delta.
BlaOut bla_step(const BlaConfig& cfg, BlaState& st, std::uint64_t u);
BlaOut bla_handle(const BlaConfig& cfg, BlaState& st, PartyId from, const ProtocolMessage& m);
BlaOut bla_on_leader(const BlaConfig& cfg, BlaState& st, std::uint64_t k, PartyId leader);

GcConfig gc_config_for(const BlaConfig& cfg, std::uint64_t k);

}  // namespace nasmr::bla
