#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "nasmr/crypto.hpp"
#include "nasmr/types.hpp"

namespace nasmr {

enum class MsgKind : std::uint8_t {
  RbcValue,
  RbcEcho,
  RbcReady,
  AbaEst,
  AbaAux,
  AbaDone,
  Buffer,
  WbaValue,
  Status,
  Propose,
  Commit,
  Notify,
};

const char* msg_kind_name(MsgKind k);

// Routing coordinates shared by every wire message. `inst` is the RBC sender
// index / ABA index / Propose proposer; `round` is the ABA round or the GC
// iteration.
struct MsgContext {
  Slot slot = 0;
  std::uint64_t inst = 0;
  std::uint64_t round = 0;
  bool operator==(const MsgContext&) const = default;
};

struct RbcValueMsg {
  Bytes value;
  bool operator==(const RbcValueMsg&) const = default;
};
struct RbcEchoMsg {
  Bytes value;
  bool operator==(const RbcEchoMsg&) const = default;
};
struct RbcReadyMsg {
  Bytes value;
  bool operator==(const RbcReadyMsg&) const = default;
};
struct AbaEstMsg {
  bool b = false;
  bool operator==(const AbaEstMsg&) const = default;
};
struct AbaAuxMsg {
  bool b = false;
  bool operator==(const AbaAuxMsg&) const = default;
};
struct AbaDoneMsg {
  bool b = false;
  bool operator==(const AbaDoneMsg&) const = default;
};
struct BufferMsg {
  SignedBuffer sb;
  bool operator==(const BufferMsg&) const = default;
};
struct WbaValueMsg {
  PartyId signer = 0;
  bool v = false;
  Signature sig;
  bool operator==(const WbaValueMsg&) const = default;
};
struct StatusMsg {
  PartyId signer = 0;
  Vote vote;
  Signature sig;
  bool operator==(const StatusMsg&) const = default;
};
struct ProposeMsg {
  PartyId proposer = 0;
  std::vector<StatusMsg> statuses;  // proposer-chosen order, forwarded verbatim
  Signature sig;
  bool operator==(const ProposeMsg&) const = default;
};
struct CommitMsg {
  PartyId signer = 0;
  std::uint64_t k = 0;
  Pair pair;
  Signature sig;
  bool operator==(const CommitMsg&) const = default;
};
struct NotifyMsg {
  std::uint64_t k = 0;
  Pair pair;
  Certificate cert;
  bool operator==(const NotifyMsg&) const = default;
};

using MsgBody = std::variant<RbcValueMsg, RbcEchoMsg, RbcReadyMsg, AbaEstMsg, AbaAuxMsg,
                             AbaDoneMsg, BufferMsg, WbaValueMsg, StatusMsg, ProposeMsg,
                             CommitMsg, NotifyMsg>;

struct ProtocolMessage {
  MsgContext ctx;
  MsgBody body;

  MsgKind kind() const;
  Bytes encode_body() const;
  Bytes encode() const { return enc::versioned(encode_body()); }
  Digest digest() const { return sha256(encode_body()); }
  bool operator==(const ProtocolMessage&) const = default;
};

std::optional<ProtocolMessage> decode_message(const Bytes& full);

// Signature payloads. Each signed object is signed over
// domain_tag || payload with the tags built below.
Bytes status_sign_payload(const Vote& vote);
Bytes propose_sign_payload(const std::vector<StatusMsg>& statuses);
Bytes commit_sign_payload(std::uint64_t k, const Pair& pair);
Bytes wba_value_sign_payload(bool v);

crypto::DomainTag buffer_tag(std::uint64_t session, Slot slot);
crypto::DomainTag wba_value_tag(std::uint64_t session);
crypto::DomainTag status_tag(std::uint64_t session, Slot slot);
crypto::DomainTag propose_tag(std::uint64_t session, Slot slot, std::uint64_t k,
                              PartyId proposer);
crypto::DomainTag commit_tag(std::uint64_t session, Slot slot);

}  // namespace nasmr
