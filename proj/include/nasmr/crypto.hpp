#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "nasmr/rng.hpp"
#include "nasmr/types.hpp"

namespace nasmr::crypto {

// Domain-separation tag attached to every signature:
// (protocol name, session id, slot index, subprotocol name, instance index,
// message kind).
struct DomainTag {
  std::string protocol = "nasmr";
  std::uint64_t session = 0;
  Slot slot = 0;
  std::string subprotocol;
  std::uint64_t instance = 0;
  std::uint64_t kind = 0;

  Bytes encode_body() const;
};

class Ledger;

// Signing capability scoped to one party. Honest party runtimes hold their
// own; the adversary receives one per corrupted party.
class PartySigner {
 public:
  PartySigner() = default;
  Signature sign(const DomainTag& tag, const Bytes& payload) const;
  PartyId party() const { return party_; }

 private:
  friend class Ledger;
  PartySigner(Ledger* ledger, PartyId party) : ledger_(ledger), party_(party) {}
  Ledger* ledger_ = nullptr;
  PartyId party_ = 0;
};

// Signs for any corrupted party; signing for an uncorrupted one throws.
class AdversarySigner {
 public:
  AdversarySigner() = default;
  Signature sign(PartyId as, const DomainTag& tag, const Bytes& payload) const;

 private:
  friend class Ledger;
  explicit AdversarySigner(Ledger* ledger) : ledger_(ledger) {}
  Ledger* ledger_ = nullptr;
};

// Idealized PKI: a signature verifies iff the key owner (or its corruptor)
// actually produced it, which the ledger records.
class Ledger {
 public:
  explicit Ledger(std::uint32_t n) : n_(n) {}

  PartySigner signer_for(PartyId p);
  AdversarySigner adversary_signer() { return AdversarySigner(this); }

  void mark_corrupted(PartyId p) { corrupted_.insert(p); }
  bool is_corrupted(PartyId p) const { return corrupted_.count(p) != 0; }

  bool verify(PartyId signer, const DomainTag& tag, const Bytes& payload,
              const Signature& sig) const;

  std::uint32_t n() const { return n_; }

 private:
  friend class PartySigner;
  friend class AdversarySigner;
  Signature record(PartyId p, const DomainTag& tag, const Bytes& payload);
  static Digest message_digest(const DomainTag& tag, const Bytes& payload);
  static Signature token(PartyId p, const Digest& msg_digest);

  std::uint32_t n_;
  std::set<std::pair<PartyId, Digest>> signed_;
  std::set<PartyId> corrupted_;
};

// Verification context for pairs/votes: the signatures inside were produced
// under (session, slot)-scoped domain tags.
struct Verifier {
  const Ledger* ledger = nullptr;
  std::uint64_t session = 0;
  Slot slot = 0;
};

// Atomic leader election: per instance, samples a uniform leader once the
// requester quorum (> n/2 distinct parties) is reached, then reveals to all.
class LeaderOracle {
 public:
  LeaderOracle(std::uint32_t n, Rng rng) : n_(n), rng_(std::move(rng)) {}

  struct Reveal {
    std::uint64_t instance;
    PartyId leader;
  };

  // Registers the request; returns a reveal the first time the quorum is hit.
  std::optional<Reveal> request(std::uint64_t instance, PartyId requester);
  std::optional<PartyId> leader_of(std::uint64_t instance) const;
  std::size_t request_count(std::uint64_t instance) const;

 private:
  struct Inst {
    std::set<PartyId> requesters;
    std::optional<PartyId> leader;
  };
  std::uint32_t n_;
  Rng rng_;
  std::map<std::uint64_t, Inst> insts_;
};

// Common-coin oracle for the delegated ABA; quorum t_a + 1 so the adversary
// alone can never see a coin early.
class CoinOracle {
 public:
  CoinOracle(std::uint32_t quorum, Rng rng) : quorum_(quorum), rng_(std::move(rng)) {}

  struct Key {
    std::uint64_t instance;
    std::uint64_t round;
    auto operator<=>(const Key&) const = default;
  };
  struct Reveal {
    Key key;
    bool value;
  };

  std::optional<Reveal> request(const Key& key, PartyId requester);
  std::optional<bool> value_of(const Key& key) const;

 private:
  struct Inst {
    std::set<PartyId> requesters;
    std::optional<bool> value;
  };
  std::uint32_t quorum_;
  Rng rng_;
  std::map<Key, Inst> insts_;
};

}  // namespace nasmr::crypto
