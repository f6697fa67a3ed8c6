#include "nasmr/crypto.hpp"

namespace nasmr::crypto {

Bytes DomainTag::encode_body() const {
  enc::Writer w;
  w.tag(enc::Tag::DomainTag);
  w.bytes(to_bytes(protocol));
  w.u64(session);
  w.u64(slot);
  w.bytes(to_bytes(subprotocol));
  w.u64(instance);
  w.u64(kind);
  return w.take();
}

Signature PartySigner::sign(const DomainTag& tag, const Bytes& payload) const {
  if (ledger_ == nullptr) throw CapabilityError("signer not bound to a ledger");
  return ledger_->record(party_, tag, payload);
}

Signature AdversarySigner::sign(PartyId as, const DomainTag& tag, const Bytes& payload) const {
  if (ledger_ == nullptr) throw CapabilityError("adversary signer not bound");
  if (!ledger_->is_corrupted(as)) {
    throw CapabilityError("adversary cannot sign for uncorrupted party");
  }
  return ledger_->record(as, tag, payload);
}

PartySigner Ledger::signer_for(PartyId p) {
  if (p == 0 || p > n_) throw CapabilityError("no such party");
  return PartySigner(this, p);
}

Digest Ledger::message_digest(const DomainTag& tag, const Bytes& payload) {
  Bytes buf = tag.encode_body();
  buf.insert(buf.end(), payload.begin(), payload.end());
  return sha256(buf);
}

Signature Ledger::token(PartyId p, const Digest& msg_digest) {
  Bytes buf;
  buf.reserve(4 + 4 + 32);
  buf.push_back('s');
  buf.push_back('i');
  buf.push_back('g');
  buf.push_back(':');
  for (int shift = 24; shift >= 0; shift -= 8) {
    buf.push_back(static_cast<std::uint8_t>((p >> shift) & 0xff));
  }
  buf.insert(buf.end(), msg_digest.bytes.begin(), msg_digest.bytes.end());
  return Signature{sha256(buf)};
}

Signature Ledger::record(PartyId p, const DomainTag& tag, const Bytes& payload) {
  Digest md = message_digest(tag, payload);
  signed_.insert({p, md});
  return token(p, md);
}

bool Ledger::verify(PartyId signer, const DomainTag& tag, const Bytes& payload,
                    const Signature& sig) const {
  if (signer == 0 || signer > n_) return false;
  Digest md = message_digest(tag, payload);
  if (signed_.count({signer, md}) == 0) return false;
  return sig == token(signer, md);
}

std::optional<LeaderOracle::Reveal> LeaderOracle::request(std::uint64_t instance,
                                                          PartyId requester) {
  Inst& inst = insts_[instance];
  if (inst.leader.has_value()) return std::nullopt;  // already revealed
  inst.requesters.insert(requester);
  if (inst.requesters.size() > n_ / 2) {
    inst.leader = static_cast<PartyId>(1 + rng_.uniform(n_));
    return Reveal{instance, *inst.leader};
  }
  return std::nullopt;
}

std::optional<PartyId> LeaderOracle::leader_of(std::uint64_t instance) const {
  auto it = insts_.find(instance);
  if (it == insts_.end()) return std::nullopt;
  return it->second.leader;
}

std::size_t LeaderOracle::request_count(std::uint64_t instance) const {
  auto it = insts_.find(instance);
  return it == insts_.end() ? 0 : it->second.requesters.size();
}

std::optional<CoinOracle::Reveal> CoinOracle::request(const Key& key, PartyId requester) {
  Inst& inst = insts_[key];
  if (inst.value.has_value()) return std::nullopt;
  inst.requesters.insert(requester);
  if (inst.requesters.size() >= quorum_) {
    inst.value = rng_.bit();
    return Reveal{key, *inst.value};
  }
  return std::nullopt;
}

std::optional<bool> CoinOracle::value_of(const Key& key) const {
  auto it = insts_.find(key);
  if (it == insts_.end()) return std::nullopt;
  return it->second.value;
}

}  // namespace nasmr::crypto
