#include "nasmr/aba.hpp"

namespace nasmr::aba {

namespace {

ProtocolMessage make_msg(const Config& cfg, std::uint64_t round, MsgBody body) {
  ProtocolMessage m;
  m.ctx = MsgContext{cfg.slot, cfg.index, round};
  m.body = std::move(body);
  return m;
}

std::size_t est_count(const State& st, const RoundState& rs, bool b) {
  std::set<PartyId> senders = rs.est_senders[b ? 1 : 0];
  for (const auto& [p, v] : st.done_votes) {
    if (v == b) senders.insert(p);
  }
  return senders.size();
}

void decide(const Config& cfg, State& st, bool b, Out& out) {
  st.decided = b;
  st.decided_round = st.round;
  out.decided_now = true;
  if (!st.sent_done) {
    st.sent_done = true;
    out.broadcasts.push_back(make_msg(cfg, st.round, AbaDoneMsg{b}));
  }
  st.halted = true;
}

// Re-evaluates every trigger for the current round until nothing changes.
void progress(const Config& cfg, State& st, Out& out) {
  if (!st.started || st.halted) return;
  const std::uint32_t t_a = cfg.params.t_a;
  const std::uint32_t n = cfg.params.n;

  bool changed = true;
  while (changed && !st.halted) {
    changed = false;
    RoundState& rs = st.rounds[st.round];

    for (int bi = 0; bi < 2; ++bi) {
      const bool b = (bi == 1);
      const std::size_t cnt = est_count(st, rs, b);
      if (cnt >= t_a + 1 && !rs.sent_est[bi]) {
        rs.sent_est[bi] = true;
        out.broadcasts.push_back(make_msg(cfg, st.round, AbaEstMsg{b}));
        changed = true;
      }
      if (cnt >= 2 * t_a + 1 && !rs.bin_values[bi]) {
        rs.bin_values[bi] = true;
        changed = true;
        if (!rs.sent_aux) {
          rs.sent_aux = true;
          out.broadcasts.push_back(make_msg(cfg, st.round, AbaAuxMsg{b}));
        }
      }
    }

    // AUX quorum: n - t_a distinct senders whose values lie in bin_values.
    std::set<PartyId> support;
    std::array<bool, 2> seen{false, false};
    auto consider = [&](PartyId p, bool v) {
      if (!rs.bin_values[v ? 1 : 0]) return;
      support.insert(p);
      seen[v ? 1 : 0] = true;
    };
    for (const auto& [p, v] : rs.aux_votes) consider(p, v);
    for (const auto& [p, v] : st.done_votes) consider(p, v);

    if (support.size() >= n - t_a) {
      if (!rs.coin.has_value()) {
        if (!rs.coin_requested) {
          rs.coin_requested = true;
          out.coin_requests.push_back(st.round);
          changed = true;
        }
      } else {
        const bool c = *rs.coin;
        if (seen[0] != seen[1]) {
          const bool w = seen[1];
          st.est = w;
          if (w == c) {
            decide(cfg, st, w, out);
            return;
          }
        } else {
          st.est = c;
        }
        ++st.round;
        RoundState& next = st.rounds[st.round];
        const int ei = *st.est ? 1 : 0;
        if (!next.sent_est[ei]) {
          next.sent_est[ei] = true;
          out.broadcasts.push_back(make_msg(cfg, st.round, AbaEstMsg{*st.est}));
        }
        changed = true;
      }
    }
  }
}

void check_done_adoption(const Config& cfg, State& st, Out& out) {
  if (st.decided.has_value() || st.halted) return;
  for (int bi = 0; bi < 2; ++bi) {
    const bool b = (bi == 1);
    std::size_t cnt = 0;
    for (const auto& [p, v] : st.done_votes) {
      if (v == b) ++cnt;
    }
    if (cnt >= cfg.params.t_a + 1) {
      decide(cfg, st, b, out);
      return;
    }
  }
}

}  // namespace

Out init(const Config& cfg, State& st, bool input) {
  Out out;
  if (st.halted || st.started) {
    ++st.dropped;
    return out;
  }
  st.started = true;
  st.est = input;
  RoundState& rs = st.rounds[1];
  const int ei = input ? 1 : 0;
  if (!rs.sent_est[ei]) {
    rs.sent_est[ei] = true;
    out.broadcasts.push_back(make_msg(cfg, 1, AbaEstMsg{input}));
  }
  // Messages may have been buffered before the instance began.
  check_done_adoption(cfg, st, out);
  progress(cfg, st, out);
  return out;
}

Out handle(const Config& cfg, State& st, PartyId from, const ProtocolMessage& m) {
  Out out;
  if (st.halted) {
    ++st.dropped;
    return out;
  }

  if (const auto* est = std::get_if<AbaEstMsg>(&m.body)) {
    st.rounds[m.ctx.round].est_senders[est->b ? 1 : 0].insert(from);
  } else if (const auto* aux = std::get_if<AbaAuxMsg>(&m.body)) {
    st.rounds[m.ctx.round].aux_votes.emplace(from, aux->b);
  } else if (const auto* done = std::get_if<AbaDoneMsg>(&m.body)) {
    st.done_votes.emplace(from, done->b);
    check_done_adoption(cfg, st, out);
    if (st.halted) return out;
  } else {
    ++st.dropped;
    return out;
  }
  progress(cfg, st, out);
  return out;
}

Out on_coin(const Config& cfg, State& st, std::uint64_t round, bool value) {
  Out out;
  if (st.halted) {
    ++st.dropped;
    return out;
  }
  st.rounds[round].coin = value;
  progress(cfg, st, out);
  return out;
}

void halt(State& st) {
  st.halted = true;
}

}  // namespace nasmr::aba
