#pragma once

#include <functional>
#include <memory>
#include <set>

#include "nasmr/crypto.hpp"
#include "nasmr/message.hpp"
#include "nasmr/rng.hpp"
#include "nasmr/scenario.hpp"
#include "nasmr/transcript.hpp"

namespace nasmr {

struct Envelope {
  std::uint64_t id = 0;
  PartyId src = 0;
  PartyId dst = 0;
  Bytes payload;  // canonical-encoded ProtocolMessage
  Time send_time = 0;
  Time deliver_time = 0;
  std::uint64_t priority = 0;
  bool clamped = false;
};

// Side effects a protocol handler may produce. Implemented by the simulator
// for real parties and by strategies for their virtual copies.
class Effects {
 public:
  virtual ~Effects() = default;
  virtual void send(PartyId dst, const ProtocolMessage& m) = 0;
  virtual void broadcast(const ProtocolMessage& m) = 0;  // all n, including self
  virtual void wake_at(Time t) = 0;
  virtual void request_leader(Slot slot, std::uint64_t k) = 0;
  virtual void request_coin(Slot slot, std::uint64_t index, std::uint64_t round) = 0;
  virtual void output(const std::string& what, const Bytes& payload, const std::string& note) = 0;
  virtual void epoch_entered(Slot j) = 0;
  virtual void note(const std::string& text) = 0;
  virtual Time now() const = 0;
};

// Environment handed to a party at construction.
struct PartyEnv {
  ProtocolParams params;
  std::uint64_t session = 0;
  bool sync_mode = true;
  Time delta = 1;
  PartyId self = 0;
  crypto::PartySigner signer;
  const crypto::Ledger* ledger = nullptr;
  const ScenarioConfig* scenario = nullptr;
};

class IParty {
 public:
  virtual ~IParty() = default;
  virtual void start(Effects& fx) = 0;
  virtual void on_message(PartyId from, const ProtocolMessage& m, Effects& fx) = 0;
  virtual void on_wake(Time now, Effects& fx) = 0;
  virtual void on_leader(Slot slot, std::uint64_t k, PartyId leader, Effects& fx) = 0;
  virtual void on_coin(Slot slot, std::uint64_t index, std::uint64_t round, bool value,
                       Effects& fx) = 0;
  virtual void on_transaction(const Bytes& payload, Effects& fx) = 0;
  virtual Digest state_digest() const = 0;
  virtual std::string summary_note() const { return ""; }
};

struct ScheduleDecision {
  Time deliver_time = 0;
  std::uint64_t priority = 0;
};

struct OracleReveal {
  bool is_leader = false;
  Slot slot = 0;
  std::uint64_t k_or_index = 0;
  std::uint64_t round = 0;  // coins only
  std::uint64_t value = 0;  // leader id or coin bit
};

// Capabilities available to an adversary strategy.
class AdvCtx {
 public:
  virtual ~AdvCtx() = default;
  virtual Time now() const = 0;
  virtual const ScenarioConfig& scenario() const = 0;
  virtual Rng& rng() = 0;
  virtual bool is_corrupted(PartyId p) const = 0;
  virtual std::uint32_t budget_left() const = 0;
  virtual bool corrupt(PartyId p) = 0;
  virtual void send_as(PartyId src, PartyId dst, const ProtocolMessage& m) = 0;
  virtual void request_leader_as(PartyId p, Slot slot, std::uint64_t k) = 0;
  virtual void request_coin_as(PartyId p, Slot slot, std::uint64_t index,
                               std::uint64_t round) = 0;
  virtual crypto::AdversarySigner& signer() = 0;
  // Corruption transfers the party's signing capability.
  virtual crypto::PartySigner party_signer_for_corrupted(PartyId p) = 0;
  virtual const crypto::Ledger& ledger() const = 0;
  virtual void wake_at(Time t) = 0;
};

// A pure function of (visibility log, RNG) -> actions, realized as hooks
// invoked by the event loop in deterministic order.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  virtual void on_start(AdvCtx& a) { (void)a; }
  // Assigns (deliver_time, priority); the simulator clamps to the mode bound.
  virtual ScheduleDecision schedule(const Envelope& e, AdvCtx& a);
  // Rushing: runs after all honest sends at `t` are visible.
  virtual void on_phase(Time t, AdvCtx& a) {
    (void)t;
    (void)a;
  }
  virtual void on_honest_send(const Envelope& e, AdvCtx& a) {
    (void)e;
    (void)a;
  }
  virtual void on_deliver_to_corrupted(const Envelope& e, AdvCtx& a) {
    (void)e;
    (void)a;
  }
  virtual void on_tx_to_corrupted(PartyId p, const Bytes& payload, AdvCtx& a) {
    (void)p;
    (void)payload;
    (void)a;
  }
  // Invoked between oracle sampling and same-timestamp delivery; adaptive
  // corruption here precedes the victim's handler.
  virtual void on_oracle_reveal(const OracleReveal& r, AdvCtx& a) {
    (void)r;
    (void)a;
  }
  virtual void on_wake(Time t, AdvCtx& a) {
    (void)t;
    (void)a;
  }
};

using PartyFactory = std::function<std::unique_ptr<IParty>(const PartyEnv&)>;

// Deterministic discrete-event simulation of one scenario.
class Simulation {
 public:
  Simulation(const ScenarioConfig& cfg, PartyFactory factory,
             std::unique_ptr<Strategy> strategy);
  ~Simulation();

  // Runs to horizon or quiescence; returns the transcript text.
  std::string run();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Packs oracle instance keys into the oracle id space.
std::uint64_t leader_instance_id(Slot slot, std::uint64_t k);
std::uint64_t coin_instance_id(Slot slot, std::uint64_t index);

}  // namespace nasmr
