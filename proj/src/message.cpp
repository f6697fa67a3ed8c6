#include "nasmr/message.hpp"

namespace nasmr {

namespace {

enc::Tag body_tag(MsgKind k) {
  switch (k) {
    case MsgKind::RbcValue: return enc::Tag::RbcValue;
    case MsgKind::RbcEcho: return enc::Tag::RbcEcho;
    case MsgKind::RbcReady: return enc::Tag::RbcReady;
    case MsgKind::AbaEst: return enc::Tag::AbaEst;
    case MsgKind::AbaAux: return enc::Tag::AbaAux;
    case MsgKind::AbaDone: return enc::Tag::AbaDone;
    case MsgKind::Buffer: return enc::Tag::Buffer;
    case MsgKind::WbaValue: return enc::Tag::WbaValue;
    case MsgKind::Status: return enc::Tag::Status;
    case MsgKind::Propose: return enc::Tag::Propose;
    case MsgKind::Commit: return enc::Tag::Commit;
    case MsgKind::Notify: return enc::Tag::Notify;
  }
  throw std::logic_error("bad MsgKind");
}

void put_sig(enc::Writer& w, const Signature& s) {
  w.raw(Bytes(s.token.bytes.begin(), s.token.bytes.end()));
}

bool get_sig(enc::Reader& r, Signature& s) {
  for (auto& b : s.token.bytes) {
    if (!r.u8(b)) return false;
  }
  return true;
}

Bytes encode_status_body(const StatusMsg& m) {
  enc::Writer w;
  w.tag(enc::Tag::Status);
  w.u64(m.signer);
  w.raw(m.vote.encode_body());
  put_sig(w, m.sig);
  return w.take();
}

std::optional<StatusMsg> decode_status_body(enc::Reader& r) {
  std::uint8_t tag = 0;
  if (!r.u8(tag) || tag != static_cast<std::uint8_t>(enc::Tag::Status)) return std::nullopt;
  StatusMsg m;
  std::uint64_t signer = 0;
  if (!r.u64(signer)) return std::nullopt;
  m.signer = static_cast<PartyId>(signer);
  auto v = Vote::decode_body(r);
  if (!v) return std::nullopt;
  m.vote = std::move(*v);
  if (!get_sig(r, m.sig)) return std::nullopt;
  return m;
}

}  // namespace

const char* msg_kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::RbcValue: return "VALUE";
    case MsgKind::RbcEcho: return "ECHO";
    case MsgKind::RbcReady: return "READY";
    case MsgKind::AbaEst: return "EST";
    case MsgKind::AbaAux: return "AUX";
    case MsgKind::AbaDone: return "DONE";
    case MsgKind::Buffer: return "BUFFER";
    case MsgKind::WbaValue: return "WBAVALUE";
    case MsgKind::Status: return "STATUS";
    case MsgKind::Propose: return "PROPOSE";
    case MsgKind::Commit: return "COMMIT";
    case MsgKind::Notify: return "NOTIFY";
  }
  return "?";
}

MsgKind ProtocolMessage::kind() const {
  return static_cast<MsgKind>(body.index());
}

Bytes ProtocolMessage::encode_body() const {
  enc::Writer w;
  w.tag(body_tag(kind()));
  w.u64(ctx.slot);
  w.u64(ctx.inst);
  w.u64(ctx.round);
  std::visit(
      [&w](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RbcValueMsg> || std::is_same_v<T, RbcEchoMsg> ||
                      std::is_same_v<T, RbcReadyMsg>) {
          w.bytes(m.value);
        } else if constexpr (std::is_same_v<T, AbaEstMsg> || std::is_same_v<T, AbaAuxMsg> ||
                             std::is_same_v<T, AbaDoneMsg>) {
          w.u8(m.b ? 1 : 0);
        } else if constexpr (std::is_same_v<T, BufferMsg>) {
          w.raw(m.sb.encode_body());
        } else if constexpr (std::is_same_v<T, WbaValueMsg>) {
          w.u64(m.signer);
          w.u8(m.v ? 1 : 0);
          put_sig(w, m.sig);
        } else if constexpr (std::is_same_v<T, StatusMsg>) {
          w.raw(encode_status_body(m));
        } else if constexpr (std::is_same_v<T, ProposeMsg>) {
          w.u64(m.proposer);
          std::vector<Bytes> elems;
          elems.reserve(m.statuses.size());
          for (const auto& s : m.statuses) elems.push_back(encode_status_body(s));
          w.list_of(elems);
          put_sig(w, m.sig);
        } else if constexpr (std::is_same_v<T, CommitMsg>) {
          w.u64(m.signer);
          w.u64(m.k);
          w.raw(m.pair.encode_body());
          put_sig(w, m.sig);
        } else if constexpr (std::is_same_v<T, NotifyMsg>) {
          w.u64(m.k);
          w.raw(m.pair.encode_body());
          w.raw(m.cert.encode_body());
        }
      },
      body);
  return w.take();
}

std::optional<ProtocolMessage> decode_message(const Bytes& full) {
  Bytes body;
  if (!enc::unversion(full, body)) return std::nullopt;
  enc::Reader r(body);
  std::uint8_t tag = 0;
  if (!r.u8(tag)) return std::nullopt;
  ProtocolMessage out;
  if (!r.u64(out.ctx.slot) || !r.u64(out.ctx.inst) || !r.u64(out.ctx.round)) {
    return std::nullopt;
  }

  auto read_bytes_msg = [&r](Bytes& v) { return r.bytes(v); };
  auto read_bit = [&r](bool& b) {
    std::uint8_t x = 0;
    if (!r.u8(x) || x > 1) return false;
    b = (x == 1);
    return true;
  };

  switch (static_cast<enc::Tag>(tag)) {
    case enc::Tag::RbcValue: {
      RbcValueMsg m;
      if (!read_bytes_msg(m.value)) return std::nullopt;
      out.body = std::move(m);
      break;
    }
    case enc::Tag::RbcEcho: {
      RbcEchoMsg m;
      if (!read_bytes_msg(m.value)) return std::nullopt;
      out.body = std::move(m);
      break;
    }
    case enc::Tag::RbcReady: {
      RbcReadyMsg m;
      if (!read_bytes_msg(m.value)) return std::nullopt;
      out.body = std::move(m);
      break;
    }
    case enc::Tag::AbaEst: {
      AbaEstMsg m;
      if (!read_bit(m.b)) return std::nullopt;
      out.body = m;
      break;
    }
    case enc::Tag::AbaAux: {
      AbaAuxMsg m;
      if (!read_bit(m.b)) return std::nullopt;
      out.body = m;
      break;
    }
    case enc::Tag::AbaDone: {
      AbaDoneMsg m;
      if (!read_bit(m.b)) return std::nullopt;
      out.body = m;
      break;
    }
    case enc::Tag::Buffer: {
      BufferMsg m;
      auto sb = SignedBuffer::decode_body(r);
      if (!sb) return std::nullopt;
      m.sb = std::move(*sb);
      out.body = std::move(m);
      break;
    }
    case enc::Tag::WbaValue: {
      WbaValueMsg m;
      std::uint64_t signer = 0;
      if (!r.u64(signer) || !read_bit(m.v) || !get_sig(r, m.sig)) return std::nullopt;
      m.signer = static_cast<PartyId>(signer);
      out.body = m;
      break;
    }
    case enc::Tag::Status: {
      auto s = decode_status_body(r);
      if (!s) return std::nullopt;
      out.body = std::move(*s);
      break;
    }
    case enc::Tag::Propose: {
      ProposeMsg m;
      std::uint64_t proposer = 0, count = 0;
      if (!r.u64(proposer) || !r.count(count)) return std::nullopt;
      m.proposer = static_cast<PartyId>(proposer);
      for (std::uint64_t i = 0; i < count; ++i) {
        auto s = decode_status_body(r);
        if (!s) return std::nullopt;
        m.statuses.push_back(std::move(*s));
      }
      if (!get_sig(r, m.sig)) return std::nullopt;
      out.body = std::move(m);
      break;
    }
    case enc::Tag::Commit: {
      CommitMsg m;
      std::uint64_t signer = 0;
      if (!r.u64(signer) || !r.u64(m.k)) return std::nullopt;
      m.signer = static_cast<PartyId>(signer);
      auto p = Pair::decode_body(r);
      if (!p) return std::nullopt;
      m.pair = std::move(*p);
      if (!get_sig(r, m.sig)) return std::nullopt;
      out.body = std::move(m);
      break;
    }
    case enc::Tag::Notify: {
      NotifyMsg m;
      if (!r.u64(m.k)) return std::nullopt;
      auto p = Pair::decode_body(r);
      if (!p) return std::nullopt;
      m.pair = std::move(*p);
      auto c = Certificate::decode_body(r);
      if (!c) return std::nullopt;
      m.cert = std::move(*c);
      out.body = std::move(m);
      break;
    }
    default:
      return std::nullopt;
  }
  if (!r.done()) return std::nullopt;
  return out;
}

Bytes status_sign_payload(const Vote& vote) {
  return vote.encode_body();
}

Bytes propose_sign_payload(const std::vector<StatusMsg>& statuses) {
  enc::Writer w;
  std::vector<Bytes> elems;
  elems.reserve(statuses.size());
  for (const auto& s : statuses) elems.push_back(encode_status_body(s));
  w.list_of(elems);
  return w.take();
}

Bytes commit_sign_payload(std::uint64_t k, const Pair& pair) {
  enc::Writer w;
  w.tag(enc::Tag::Commit);
  w.u64(k);
  w.raw(pair.encode_body());
  return w.take();
}

Bytes wba_value_sign_payload(bool v) {
  enc::Writer w;
  w.u8(v ? 1 : 0);
  return w.take();
}

crypto::DomainTag buffer_tag(std::uint64_t session, Slot slot) {
  return {"nasmr", session, slot, "smr-buffer", 0,
          static_cast<std::uint64_t>(MsgKind::Buffer)};
}

crypto::DomainTag wba_value_tag(std::uint64_t session) {
  return {"nasmr", session, 0, "wba-input", 0,
          static_cast<std::uint64_t>(MsgKind::WbaValue)};
}

crypto::DomainTag status_tag(std::uint64_t session, Slot slot) {
  return {"nasmr", session, slot, "gc-status", 0,
          static_cast<std::uint64_t>(MsgKind::Status)};
}

crypto::DomainTag propose_tag(std::uint64_t session, Slot slot, std::uint64_t k,
                              PartyId proposer) {
  return {"nasmr", session, slot, "gc-propose", (k << 16) | proposer,
          static_cast<std::uint64_t>(MsgKind::Propose)};
}

crypto::DomainTag commit_tag(std::uint64_t session, Slot slot) {
  return {"nasmr", session, slot, "gc-commit", 0,
          static_cast<std::uint64_t>(MsgKind::Commit)};
}

}  // namespace nasmr
