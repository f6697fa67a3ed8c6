#pragma once

#include "nasmr/crypto.hpp"
#include "nasmr/message.hpp"
#include "nasmr/types.hpp"

namespace nasmr {

// (B, Sigma) is t-valid: verifying signed buffers from strictly more than t
// distinct signers, each buffer a subset of B. Entries whose signature does
// not verify count as absent. "valid" unqualified means 0-valid.
bool pair_is_valid(const Pair& pair, std::uint32_t t, const crypto::Verifier& v);

enum class CertKMode {
  Exact,    // every entry's k' == k (a k-certificate in the GC sense)
  AtLeast,  // every entry's k' >= k (vote certificates)
};

// Cert carries verifying Commit signatures on exactly this pair from more
// than n/2 distinct signers, with per-entry k' constrained by `mode`.
// Non-verifying or out-of-range entries count as absent.
bool certificate_valid(const Certificate& cert, const Pair& pair, std::uint64_t k,
                       CertKMode mode, std::uint32_t n, const crypto::Verifier& v);

// (k, B, Sigma, C) is a vote: pair 0-valid, and either k == 0 or C is a
// majority certificate with per-signer k' >= k.
bool vote_is_valid(const Vote& vote, std::uint32_t n, const crypto::Verifier& v);

// Correctly-formed message predicates (Status / Propose / Commit / Notify).
bool status_correctly_formed(const StatusMsg& m, std::uint32_t n, const crypto::Verifier& v);
bool propose_correctly_formed(const ProposeMsg& m, PartyId proposer, std::uint64_t k,
                              std::uint32_t n, const crypto::Verifier& v);
bool commit_correctly_formed(const CommitMsg& m, std::uint64_t k, const crypto::Verifier& v);
bool notify_correctly_formed(const NotifyMsg& m, std::uint64_t k, std::uint32_t n,
                             const crypto::Verifier& v);

}  // namespace nasmr
