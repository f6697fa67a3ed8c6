#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nasmr/digest.hpp"
#include "nasmr/encoding.hpp"

namespace nasmr {

using PartyId = std::uint32_t;  // parties are 1..n; 0 is reserved (oracle/none)
using Slot = std::uint64_t;     // slots are 1-based
using Time = std::int64_t;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CapabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct WriteOnceError : std::logic_error {
  using std::logic_error::logic_error;
};

struct ProtocolParams {
  std::uint32_t n = 0;
  std::uint32_t t_a = 0;
  std::uint32_t t_s = 0;
  std::uint32_t kappa = 1;
  // When set, configurations must satisfy t_a + 2*t_s < n. Cleared only for
  // the threshold-violation demo.
  bool enforce_bound = true;

  void validate() const;  // throws ConfigError
  // Smallest count strictly greater than n/2.
  std::uint32_t majority() const { return n / 2 + 1; }
};

struct Transaction {
  Bytes payload;
  Digest id;  // pure function of payload

  static Transaction make(Bytes payload);
  Bytes encode_body() const;
  bool operator==(const Transaction& o) const { return payload == o.payload; }
};

// A set of transactions in canonical (id-sorted) order, no duplicates.
class Block {
 public:
  Block() = default;
  static Block from_txs(std::vector<Transaction> txs);
  static Block single(Bytes payload);

  bool insert(Transaction tx);  // false if already present
  bool contains(const Digest& txid) const;
  bool subset_of(const Block& other) const;
  void merge(const Block& other);
  void remove_all(const Block& other);

  const std::vector<Transaction>& txs() const { return txs_; }
  std::size_t size() const { return txs_.size(); }
  bool empty() const { return txs_.empty(); }

  Bytes encode_body() const;
  static std::optional<Block> decode_body(enc::Reader& r);
  Digest digest() const { return sha256(encode_body()); }
  bool operator==(const Block& o) const;

 private:
  std::vector<Transaction> txs_;  // sorted by id, unique
};

// Token of the idealized signature scheme; verification consults the ledger.
struct Signature {
  Digest token;
  bool operator==(const Signature& o) const = default;
};

struct SignedBuffer {
  PartyId signer = 0;
  Block buffer;
  Signature sig;

  Bytes encode_body() const;
  static std::optional<SignedBuffer> decode_body(enc::Reader& r);
  bool operator==(const SignedBuffer& o) const;
};

// (B, Sigma): a block plus signed buffers, at most one per distinct signer.
class Pair {
 public:
  Pair() = default;
  Pair(Block block, std::vector<SignedBuffer> sigma);

  // Ignored (returns false) if the signer is already present.
  bool add_signed_buffer(SignedBuffer sb);

  const Block& block() const { return block_; }
  Block& mutable_block() { return block_; }
  const std::vector<SignedBuffer>& sigma() const { return sigma_; }

  Bytes encode_body() const;
  static std::optional<Pair> decode_body(enc::Reader& r);
  Digest digest() const { return sha256(encode_body()); }
  bool operator==(const Pair& o) const;

 private:
  Block block_;
  std::vector<SignedBuffer> sigma_;  // sorted by signer, unique
};

struct CertEntry {
  PartyId signer = 0;
  std::uint64_t k_prime = 0;
  Signature sig;

  Bytes encode_body() const;
  static std::optional<CertEntry> decode_body(enc::Reader& r);
  bool operator==(const CertEntry& o) const = default;
};

// Commit-signature set; at most one entry per signer, with per-signer k'.
class Certificate {
 public:
  Certificate() = default;
  bool add(CertEntry e);  // ignored if signer already present
  const std::vector<CertEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  Bytes encode_body() const;
  static std::optional<Certificate> decode_body(enc::Reader& r);
  bool operator==(const Certificate& o) const;

 private:
  std::vector<CertEntry> entries_;  // sorted by signer, unique
};

struct Vote {
  std::uint64_t k = 0;
  Pair pair;
  Certificate cert;  // empty when k == 0

  Bytes encode_body() const;
  static std::optional<Vote> decode_body(enc::Reader& r);
  bool operator==(const Vote& o) const;
};

// Write-once, sequential-entry epoch markers.
class EpochArray {
 public:
  void enter(Slot j);  // throws WriteOnceError on violations
  bool entered(Slot j) const { return j >= 1 && j <= last_; }
  Slot last() const { return last_; }

 private:
  Slot last_ = 0;
};

// Write-once block log; writing slot j requires epoch j entered.
class BlockLog {
 public:
  void write(Slot j, Block b, const EpochArray& epochs);
  const Block* get(Slot j) const;
  const std::map<Slot, Block>& all() const { return slots_; }

 private:
  std::map<Slot, Block> slots_;
};

}  // namespace nasmr
