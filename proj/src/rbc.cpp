#include "nasmr/rbc.hpp"

namespace nasmr::rbc {

namespace {

ProtocolMessage make_msg(const Config& cfg, MsgBody body) {
  ProtocolMessage m;
  m.ctx = MsgContext{cfg.slot, cfg.sender, 0};
  m.body = std::move(body);
  return m;
}

void record_value(State& st, const Digest& d, const Bytes& v) {
  st.values.emplace(d, v);
}

void maybe_send_ready(const Config& cfg, State& st, const Digest& d, Out& out) {
  if (st.sent_ready) return;
  st.sent_ready = true;
  out.broadcasts.push_back(make_msg(cfg, RbcReadyMsg{st.values.at(d)}));
}

}  // namespace

Out init(const Config& cfg, State& st, const std::optional<Bytes>& input) {
  Out out;
  const bool is_sender = (cfg.self == cfg.sender);
  if (is_sender && !input) throw ConfigError("rbc sender has no input");
  if (!is_sender && input) throw ConfigError("rbc non-sender given an input");
  if (is_sender) {
    out.broadcasts.push_back(make_msg(cfg, RbcValueMsg{*input}));
  }
  return out;
}

Out handle(const Config& cfg, State& st, PartyId from, const ProtocolMessage& m) {
  Out out;
  if (st.terminated) {
    ++st.dropped;
    return out;
  }
  const std::uint32_t n = cfg.params.n;
  const std::uint32_t t_s = cfg.params.t_s;

  if (const auto* val = std::get_if<RbcValueMsg>(&m.body)) {
    // Only the first value message from the designated sender is delivered.
    if (from != cfg.sender || st.value_delivered) {
      ++st.dropped;
      return out;
    }
    st.value_delivered = true;
    Digest d = sha256(val->value);
    record_value(st, d, val->value);
    if (!st.sent_echo) {
      st.sent_echo = true;
      out.broadcasts.push_back(make_msg(cfg, RbcEchoMsg{val->value}));
    }
    return out;
  }

  if (const auto* echo = std::get_if<RbcEchoMsg>(&m.body)) {
    Digest d = sha256(echo->value);
    record_value(st, d, echo->value);
    st.echoes[d].insert(from);
    if (st.echoes[d].size() >= n - t_s) maybe_send_ready(cfg, st, d, out);
    return out;
  }

  if (const auto* ready = std::get_if<RbcReadyMsg>(&m.body)) {
    Digest d = sha256(ready->value);
    record_value(st, d, ready->value);
    auto& tally = st.readies[d];
    tally.insert(from);
    if (tally.size() >= t_s + 1) maybe_send_ready(cfg, st, d, out);
    if (tally.size() >= n - t_s) {
      st.output = st.values.at(d);
      st.terminated = true;
      out.output_now = true;
    }
    return out;
  }

  ++st.dropped;
  return out;
}

}  // namespace nasmr::rbc
