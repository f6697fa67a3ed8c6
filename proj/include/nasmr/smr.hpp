#pragma once

#include <deque>
#include <map>
#include <optional>

#include "nasmr/acs.hpp"
#include "nasmr/bla.hpp"

namespace nasmr::smr {

struct Config {
  ProtocolParams params;
  PartyId self = 0;
  std::uint64_t session = 0;
  Time delta = 1;
  Time start_time = 0;  // 0 for SMR, delta for the WBA embedding
  std::uint64_t slot_limit = 1;
  crypto::PartySigner signer;
  const crypto::Ledger* ledger = nullptr;

  // Slot k starts at start_time + (delta + D_BLA)(k-1), D_BLA = 5*kappa*delta.
  Time bla_duration() const {
    return 5 * static_cast<Time>(params.kappa) * delta;
  }
  Time slot_period() const { return delta + bla_duration(); }
  Time slot_start(Slot k) const {
    return start_time + slot_period() * static_cast<Time>(k - 1);
  }
  Time bla_start(Slot k) const { return slot_start(k) + delta; }
  Time bla_deadline(Slot k) const { return bla_start(k) + bla_duration(); }
};

struct LeaderReq {
  Slot slot = 0;
  std::uint64_t k = 0;
};
struct CoinReq {
  Slot slot = 0;
  std::uint64_t index = 0;
  std::uint64_t round = 0;
};

struct Out {
  std::vector<std::pair<PartyId, ProtocolMessage>> sends;
  std::vector<ProtocolMessage> broadcasts;
  std::vector<LeaderReq> leader_reqs;
  std::vector<CoinReq> coin_reqs;
  std::vector<std::pair<Slot, Block>> blocks_out;
  std::vector<Slot> epochs_entered;
  std::vector<std::pair<Slot, Pair>> bla_outputs;  // first BLA output per slot
  std::vector<std::string> notes;
};

struct SlotRuntime {
  Slot k = 0;
  bool started = false;
  Pair acc;  // the (B, Sigma) accumulator
  std::set<PartyId> buf_seen;
  bool accumulating = true;
  bla::BlaState bla;
  bool bla_started = false;
  bool bla_output_taken = false;
  bool bstar_set = false;
  Bytes bstar;  // encoded block input to ACS
  acs::State acs;
  bool acs_started = false;
  bool block_written = false;
  std::deque<std::pair<PartyId, ProtocolMessage>> pending_acs;
};

class Core {
 public:
  explicit Core(Config cfg) : cfg_(std::move(cfg)) {}

  // Absolute wake times this party needs (slot starts and BLA steps).
  std::vector<Time> wake_times() const;

  void on_wake(Time now, Out& out);
  void on_message(PartyId from, const ProtocolMessage& m, Out& out);
  void on_transaction(const Bytes& payload);
  void on_leader(Slot slot, std::uint64_t k, PartyId leader, Out& out);
  void on_coin(Slot slot, std::uint64_t index, std::uint64_t round, bool value, Out& out);

  const Config& config() const { return cfg_; }
  const Block& buffer() const { return buffer_; }
  const BlockLog& blocks() const { return blocks_; }
  const EpochArray& epochs() const { return epochs_; }
  const std::map<Slot, SlotRuntime>& slots() const { return slots_; }

  Digest state_digest() const;
  std::string summary() const;

 private:
  void slot_start(Slot k, Out& out);
  void bla_begin(Slot k, Out& out);
  void bla_deadline(Slot k, Out& out);
  void check_bla_output(Slot k, Out& out);
  void start_acs(Slot k, Bytes input, Out& out);
  void check_acs_output(Slot k, Out& out);
  void merge_bla(Slot k, bla::BlaOut&& child, Out& out);
  void merge_acs(Slot k, acs::Out&& child, Out& out);
  SlotRuntime& slot(Slot k);

  Config cfg_;
  Block buffer_;
  EpochArray epochs_;
  BlockLog blocks_;
  std::map<Slot, SlotRuntime> slots_;
};

// ---- Weak Byzantine agreement over an embedded SMR (values as txs) ----

Bytes wba_tx_payload(PartyId signer, bool v, const Signature& sig);
struct WbaTx {
  PartyId signer = 0;
  bool v = false;
  Signature sig;
};
std::optional<WbaTx> parse_wba_tx(const Bytes& payload);

class Wba {
 public:
  Wba(Config smr_cfg, bool input);

  std::vector<Time> wake_times() const { return core_.wake_times(); }
  void start(Out& out);  // broadcast own signed value
  void on_wake(Time now, Out& out);
  void on_message(PartyId from, const ProtocolMessage& m, Out& out);
  void on_leader(Slot slot, std::uint64_t k, PartyId leader, Out& out);
  void on_coin(Slot slot, std::uint64_t index, std::uint64_t round, bool value, Out& out);

  const std::optional<bool>& output() const { return output_; }
  const std::map<PartyId, bool>& values() const { return values_; }
  const Core& core() const { return core_; }
  Digest state_digest() const;
  std::string summary() const;

  // Set when the write-once output fires during the last call.
  bool output_now = false;

 private:
  void absorb_blocks(Out& out);

  Core core_;
  bool input_ = false;
  std::map<PartyId, bool> values_;  // V: at most one (value, j) per party j
  std::optional<bool> output_;
};

}  // namespace nasmr::smr
