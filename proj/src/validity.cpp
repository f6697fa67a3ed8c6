#include "nasmr/validity.hpp"

#include <set>

namespace nasmr {

bool pair_is_valid(const Pair& pair, std::uint32_t t, const crypto::Verifier& v) {
  std::set<PartyId> signers;
  const crypto::DomainTag tag = buffer_tag(v.session, v.slot);
  for (const auto& sb : pair.sigma()) {
    if (!v.ledger->verify(sb.signer, tag, sb.buffer.encode_body(), sb.sig)) continue;
    if (!sb.buffer.subset_of(pair.block())) return false;
    signers.insert(sb.signer);
  }
  return signers.size() > t;
}

bool certificate_valid(const Certificate& cert, const Pair& pair, std::uint64_t k,
                       CertKMode mode, std::uint32_t n, const crypto::Verifier& v) {
  std::set<PartyId> signers;
  const crypto::DomainTag tag = commit_tag(v.session, v.slot);
  for (const auto& e : cert.entries()) {
    if (mode == CertKMode::Exact ? (e.k_prime != k) : (e.k_prime < k)) continue;
    if (!v.ledger->verify(e.signer, tag, commit_sign_payload(e.k_prime, pair), e.sig)) {
      continue;
    }
    signers.insert(e.signer);
  }
  return signers.size() > n / 2;
}

bool vote_is_valid(const Vote& vote, std::uint32_t n, const crypto::Verifier& v) {
  if (!pair_is_valid(vote.pair, 0, v)) return false;
  if (vote.k == 0) return true;
  return certificate_valid(vote.cert, vote.pair, vote.k, CertKMode::AtLeast, n, v);
}

bool status_correctly_formed(const StatusMsg& m, std::uint32_t n, const crypto::Verifier& v) {
  if (m.signer == 0 || m.signer > n) return false;
  if (!v.ledger->verify(m.signer, status_tag(v.session, v.slot),
                        status_sign_payload(m.vote), m.sig)) {
    return false;
  }
  return vote_is_valid(m.vote, n, v);
}

bool propose_correctly_formed(const ProposeMsg& m, PartyId proposer, std::uint64_t k,
                              std::uint32_t n, const crypto::Verifier& v) {
  if (m.proposer != proposer) return false;
  if (!v.ledger->verify(proposer, propose_tag(v.session, v.slot, k, proposer),
                        propose_sign_payload(m.statuses), m.sig)) {
    return false;
  }
  std::set<PartyId> signers;
  for (const auto& s : m.statuses) {
    if (status_correctly_formed(s, n, v)) signers.insert(s.signer);
  }
  return signers.size() > n / 2;
}

bool commit_correctly_formed(const CommitMsg& m, std::uint64_t k, const crypto::Verifier& v) {
  if (m.k != k) return false;
  if (!v.ledger->verify(m.signer, commit_tag(v.session, v.slot),
                        commit_sign_payload(m.k, m.pair), m.sig)) {
    return false;
  }
  return pair_is_valid(m.pair, 0, v);
}

bool notify_correctly_formed(const NotifyMsg& m, std::uint64_t k, std::uint32_t n,
                             const crypto::Verifier& v) {
  if (m.k != k) return false;
  if (!pair_is_valid(m.pair, 0, v)) return false;
  return certificate_valid(m.cert, m.pair, k, CertKMode::Exact, n, v);
}

}  // namespace nasmr
