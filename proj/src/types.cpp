#include "nasmr/types.hpp"

#include <algorithm>

namespace nasmr {

void ProtocolParams::validate() const {
  if (n == 0) throw ConfigError("params.n must be positive");
  if (kappa == 0) throw ConfigError("params.kappa must be positive");
  if (t_a > t_s) throw ConfigError("params: t_a <= t_s required");
  if (t_s >= n) throw ConfigError("params: t_s < n required");
  if (enforce_bound && t_a + 2 * t_s >= n) {
    throw ConfigError("params: t_a + 2*t_s < n required (enforce_bound set)");
  }
}

Transaction Transaction::make(Bytes payload) {
  Transaction tx;
  tx.payload = std::move(payload);
  enc::Writer w;
  w.tag(enc::Tag::Transaction);
  w.bytes(tx.payload);
  tx.id = sha256(w.data());
  return tx;
}

Bytes Transaction::encode_body() const {
  enc::Writer w;
  w.tag(enc::Tag::Transaction);
  w.bytes(payload);
  return w.take();
}

Block Block::from_txs(std::vector<Transaction> txs) {
  Block b;
  for (auto& tx : txs) b.insert(std::move(tx));
  return b;
}

Block Block::single(Bytes payload) {
  Block b;
  b.insert(Transaction::make(std::move(payload)));
  return b;
}

bool Block::insert(Transaction tx) {
  auto it = std::lower_bound(
      txs_.begin(), txs_.end(), tx,
      [](const Transaction& a, const Transaction& b) { return a.id < b.id; });
  if (it != txs_.end() && it->id == tx.id) return false;
  txs_.insert(it, std::move(tx));
  return true;
}

bool Block::contains(const Digest& txid) const {
  auto it = std::lower_bound(
      txs_.begin(), txs_.end(), txid,
      [](const Transaction& a, const Digest& d) { return a.id < d; });
  return it != txs_.end() && it->id == txid;
}

bool Block::subset_of(const Block& other) const {
  for (const auto& tx : txs_) {
    if (!other.contains(tx.id)) return false;
  }
  return true;
}

void Block::merge(const Block& other) {
  for (const auto& tx : other.txs_) insert(tx);
}

void Block::remove_all(const Block& other) {
  std::vector<Transaction> kept;
  kept.reserve(txs_.size());
  for (auto& tx : txs_) {
    if (!other.contains(tx.id)) kept.push_back(std::move(tx));
  }
  txs_ = std::move(kept);
}

Bytes Block::encode_body() const {
  enc::Writer w;
  w.tag(enc::Tag::Block);
  std::vector<Bytes> elems;
  elems.reserve(txs_.size());
  for (const auto& tx : txs_) elems.push_back(tx.encode_body());
  w.set_of(std::move(elems));
  return w.take();
}

std::optional<Block> Block::decode_body(enc::Reader& r) {
  std::uint8_t tag = 0;
  if (!r.u8(tag) || tag != static_cast<std::uint8_t>(enc::Tag::Block)) return std::nullopt;
  std::uint64_t n = 0;
  if (!r.count(n)) return std::nullopt;
  Block b;
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint8_t t2 = 0;
    if (!r.u8(t2) || t2 != static_cast<std::uint8_t>(enc::Tag::Transaction)) return std::nullopt;
    Bytes payload;
    if (!r.bytes(payload)) return std::nullopt;
    b.insert(Transaction::make(std::move(payload)));
  }
  return b;
}

bool Block::operator==(const Block& o) const {
  if (txs_.size() != o.txs_.size()) return false;
  for (std::size_t i = 0; i < txs_.size(); ++i) {
    if (!(txs_[i].id == o.txs_[i].id)) return false;
  }
  return true;
}

Bytes SignedBuffer::encode_body() const {
  enc::Writer w;
  w.tag(enc::Tag::SignedBuffer);
  w.u64(signer);
  w.raw(buffer.encode_body());
  w.raw(Bytes(sig.token.bytes.begin(), sig.token.bytes.end()));
  return w.take();
}

std::optional<SignedBuffer> SignedBuffer::decode_body(enc::Reader& r) {
  std::uint8_t tag = 0;
  if (!r.u8(tag) || tag != static_cast<std::uint8_t>(enc::Tag::SignedBuffer)) return std::nullopt;
  SignedBuffer sb;
  std::uint64_t signer = 0;
  if (!r.u64(signer)) return std::nullopt;
  sb.signer = static_cast<PartyId>(signer);
  auto block = Block::decode_body(r);
  if (!block) return std::nullopt;
  sb.buffer = std::move(*block);
  for (auto& byte : sb.sig.token.bytes) {
    if (!r.u8(byte)) return std::nullopt;
  }
  return sb;
}

bool SignedBuffer::operator==(const SignedBuffer& o) const {
  return signer == o.signer && buffer == o.buffer && sig == o.sig;
}

Pair::Pair(Block block, std::vector<SignedBuffer> sigma) : block_(std::move(block)) {
  for (auto& sb : sigma) add_signed_buffer(std::move(sb));
}

bool Pair::add_signed_buffer(SignedBuffer sb) {
  auto it = std::lower_bound(
      sigma_.begin(), sigma_.end(), sb.signer,
      [](const SignedBuffer& a, PartyId s) { return a.signer < s; });
  if (it != sigma_.end() && it->signer == sb.signer) return false;
  sigma_.insert(it, std::move(sb));
  return true;
}

Bytes Pair::encode_body() const {
  enc::Writer w;
  w.tag(enc::Tag::Pair);
  w.raw(block_.encode_body());
  std::vector<Bytes> elems;
  elems.reserve(sigma_.size());
  for (const auto& sb : sigma_) elems.push_back(sb.encode_body());
  w.set_of(std::move(elems));
  return w.take();
}

std::optional<Pair> Pair::decode_body(enc::Reader& r) {
  std::uint8_t tag = 0;
  if (!r.u8(tag) || tag != static_cast<std::uint8_t>(enc::Tag::Pair)) return std::nullopt;
  auto block = Block::decode_body(r);
  if (!block) return std::nullopt;
  std::uint64_t n = 0;
  if (!r.count(n)) return std::nullopt;
  Pair p;
  p.block_ = std::move(*block);
  for (std::uint64_t i = 0; i < n; ++i) {
    auto sb = SignedBuffer::decode_body(r);
    if (!sb) return std::nullopt;
    p.add_signed_buffer(std::move(*sb));
  }
  return p;
}

bool Pair::operator==(const Pair& o) const {
  return block_ == o.block_ && sigma_.size() == o.sigma_.size() &&
         std::equal(sigma_.begin(), sigma_.end(), o.sigma_.begin());
}

Bytes CertEntry::encode_body() const {
  enc::Writer w;
  w.tag(enc::Tag::CertEntry);
  w.u64(signer);
  w.u64(k_prime);
  w.raw(Bytes(sig.token.bytes.begin(), sig.token.bytes.end()));
  return w.take();
}

std::optional<CertEntry> CertEntry::decode_body(enc::Reader& r) {
  std::uint8_t tag = 0;
  if (!r.u8(tag) || tag != static_cast<std::uint8_t>(enc::Tag::CertEntry)) return std::nullopt;
  CertEntry e;
  std::uint64_t signer = 0;
  if (!r.u64(signer)) return std::nullopt;
  e.signer = static_cast<PartyId>(signer);
  if (!r.u64(e.k_prime)) return std::nullopt;
  for (auto& byte : e.sig.token.bytes) {
    if (!r.u8(byte)) return std::nullopt;
  }
  return e;
}

bool Certificate::add(CertEntry e) {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), e.signer,
      [](const CertEntry& a, PartyId s) { return a.signer < s; });
  if (it != entries_.end() && it->signer == e.signer) return false;
  entries_.insert(it, std::move(e));
  return true;
}

Bytes Certificate::encode_body() const {
  enc::Writer w;
  w.tag(enc::Tag::Certificate);
  std::vector<Bytes> elems;
  elems.reserve(entries_.size());
  for (const auto& e : entries_) elems.push_back(e.encode_body());
  w.set_of(std::move(elems));
  return w.take();
}

std::optional<Certificate> Certificate::decode_body(enc::Reader& r) {
  std::uint8_t tag = 0;
  if (!r.u8(tag) || tag != static_cast<std::uint8_t>(enc::Tag::Certificate)) return std::nullopt;
  std::uint64_t n = 0;
  if (!r.count(n)) return std::nullopt;
  Certificate c;
  for (std::uint64_t i = 0; i < n; ++i) {
    auto e = CertEntry::decode_body(r);
    if (!e) return std::nullopt;
    c.add(std::move(*e));
  }
  return c;
}

bool Certificate::operator==(const Certificate& o) const {
  return entries_.size() == o.entries_.size() &&
         std::equal(entries_.begin(), entries_.end(), o.entries_.begin());
}

Bytes Vote::encode_body() const {
  enc::Writer w;
  w.tag(enc::Tag::Vote);
  w.u64(k);
  w.raw(pair.encode_body());
  w.raw(cert.encode_body());
  return w.take();
}

std::optional<Vote> Vote::decode_body(enc::Reader& r) {
  std::uint8_t tag = 0;
  if (!r.u8(tag) || tag != static_cast<std::uint8_t>(enc::Tag::Vote)) return std::nullopt;
  Vote v;
  if (!r.u64(v.k)) return std::nullopt;
  auto p = Pair::decode_body(r);
  if (!p) return std::nullopt;
  v.pair = std::move(*p);
  auto c = Certificate::decode_body(r);
  if (!c) return std::nullopt;
  v.cert = std::move(*c);
  return v;
}

bool Vote::operator==(const Vote& o) const {
  return k == o.k && pair == o.pair && cert == o.cert;
}

void EpochArray::enter(Slot j) {
  if (j == 0) throw WriteOnceError("epoch index must be >= 1");
  if (j <= last_) throw WriteOnceError("epoch already entered");
  if (j != last_ + 1) throw WriteOnceError("epochs must be entered in order");
  last_ = j;
}

void BlockLog::write(Slot j, Block b, const EpochArray& epochs) {
  if (!epochs.entered(j)) throw WriteOnceError("block written before entering its epoch");
  auto [it, inserted] = slots_.emplace(j, std::move(b));
  (void)it;
  if (!inserted) throw WriteOnceError("block slot already written");
}

const Block* BlockLog::get(Slot j) const {
  auto it = slots_.find(j);
  return it == slots_.end() ? nullptr : &it->second;
}

}  // namespace nasmr
