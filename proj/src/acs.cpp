#include "nasmr/acs.hpp"

#include <algorithm>
#include <map>

namespace nasmr::acs {

namespace {

rbc::Config rbc_config(const Config& cfg, PartyId sender) {
  return rbc::Config{cfg.params, cfg.self, sender, cfg.slot};
}

aba::Config aba_config(const Config& cfg, std::uint64_t index) {
  return aba::Config{cfg.params, cfg.self, cfg.slot, index};
}

void merge_rbc(Out& out, rbc::Out&& child) {
  for (auto& m : child.broadcasts) out.broadcasts.push_back(std::move(m));
}

void merge_aba(Out& out, std::uint64_t index, aba::Out&& child) {
  for (auto& m : child.broadcasts) out.broadcasts.push_back(std::move(m));
  for (auto r : child.coin_requests) out.coin_requests.push_back({index, r});
}

// S* and the per-value tallies over {bb_i}_{i in S*}.
std::vector<std::uint32_t> s_star(const Config& cfg, const State& st) {
  std::vector<std::uint32_t> s;
  for (std::uint32_t i = 1; i <= cfg.params.n; ++i) {
    if (st.abas[i].decided.has_value() && *st.abas[i].decided) s.push_back(i);
  }
  return s;
}

bool all_abas_terminated(const Config& cfg, const State& st) {
  for (std::uint32_t i = 1; i <= cfg.params.n; ++i) {
    if (!st.abas[i].decided.has_value()) return false;
  }
  return true;
}

void start_aba(const Config& cfg, State& st, std::uint32_t i, bool input, Out& out) {
  if (st.abas[i].started || st.abas[i].halted) return;
  merge_aba(out, i, aba::init(aba_config(cfg, i), st.abas[i], input));
}

void on_rbc_output(const Config& cfg, State& st, std::uint32_t i, Out& out) {
  if (st.rbc_out[i].has_value()) return;
  st.rbc_out[i] = st.rbcs[i].output;
  start_aba(cfg, st, i, true, out);
}

void after_event(const Config& cfg, State& st, Out& out) {
  const std::uint32_t n = cfg.params.n;
  const std::uint32_t t_a = cfg.params.t_a;

  // "When s >= n - t_a, run any executions that have not yet begun, using
  // input 0." One latch; afterwards every ABA has begun.
  auto s = s_star(cfg, st);
  if (!st.zero_inputs_started && s.size() >= n - t_a) {
    st.zero_inputs_started = true;
    for (std::uint32_t i = 1; i <= n; ++i) {
      if (!st.abas[i].started && !st.abas[i].halted) {
        start_aba(cfg, st, i, false, out);
      }
    }
  }

  Conditions c = conditions(cfg, st);

  if (!st.output.has_value()) {
    if (c.c1) {
      st.output = std::vector<Bytes>{*c.c1};
      st.exit_taken = 1;
      out.output_now = true;
    } else if (c.c2) {
      st.output = std::vector<Bytes>{*c.c2};
      st.exit_taken = 2;
      out.output_now = true;
    } else if (c.c3) {
      std::vector<Bytes> values;
      for (auto i : s_star(cfg, st)) values.push_back(*st.rbc_out[i]);
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      st.output = std::move(values);
      st.exit_taken = 3;
      out.output_now = true;
    }
  }

  if (c.c1 && !st.c1_latched) {
    st.c1_latched = true;
    for (std::uint32_t i = 1; i <= n; ++i) aba::halt(st.abas[i]);
  }
}

}  // namespace

Out init(const Config& cfg, State& st, Bytes input) {
  if (st.started) throw ConfigError("acs double init");
  Out out;
  st.started = true;
  st.input = std::move(input);
  const std::uint32_t n = cfg.params.n;
  st.rbcs.resize(n + 1);
  st.abas.resize(n + 1);
  st.rbc_out.resize(n + 1);
  for (std::uint32_t i = 1; i <= n; ++i) {
    std::optional<Bytes> in;
    if (i == cfg.self) in = st.input;
    merge_rbc(out, rbc::init(rbc_config(cfg, i), st.rbcs[i], in));
  }
  return out;
}

Out handle(const Config& cfg, State& st, PartyId from, const ProtocolMessage& m) {
  Out out;
  if (!st.started) return out;
  const std::uint64_t i = m.ctx.inst;
  if (i == 0 || i > cfg.params.n) return out;

  switch (m.kind()) {
    case MsgKind::RbcValue:
    case MsgKind::RbcEcho:
    case MsgKind::RbcReady: {
      auto idx = static_cast<std::uint32_t>(i);
      merge_rbc(out, rbc::handle(rbc_config(cfg, idx), st.rbcs[idx], from, m));
      if (st.rbcs[idx].output.has_value()) on_rbc_output(cfg, st, idx, out);
      after_event(cfg, st, out);
      break;
    }
    case MsgKind::AbaEst:
    case MsgKind::AbaAux:
    case MsgKind::AbaDone: {
      auto idx = static_cast<std::uint32_t>(i);
      merge_aba(out, idx, aba::handle(aba_config(cfg, idx), st.abas[idx], from, m));
      after_event(cfg, st, out);
      break;
    }
    default:
      break;
  }
  return out;
}

Out on_coin(const Config& cfg, State& st, std::uint64_t index, std::uint64_t round, bool value) {
  Out out;
  if (!st.started || index == 0 || index > cfg.params.n) return out;
  auto idx = static_cast<std::uint32_t>(index);
  merge_aba(out, idx, aba::on_coin(aba_config(cfg, idx), st.abas[idx], round, value));
  after_event(cfg, st, out);
  return out;
}

Conditions conditions(const Config& cfg, const State& st) {
  Conditions c;
  const std::uint32_t n = cfg.params.n;
  const std::uint32_t t_s = cfg.params.t_s;
  const std::uint32_t t_a = cfg.params.t_a;

  // C1(v): at least n - t_s broadcasts output v. Ties broken by lowest value
  // digest (cannot occur when the thresholds hold).
  std::map<Bytes, std::uint32_t> tally;
  for (std::uint32_t i = 1; i <= n; ++i) {
    if (st.rbc_out[i].has_value()) ++tally[*st.rbc_out[i]];
  }
  for (const auto& [v, cnt] : tally) {
    if (cnt >= n - t_s) {
      c.c1 = v;
      break;
    }
  }

  auto s = s_star(cfg, st);
  const bool gate = s.size() >= n - t_a && all_abas_terminated(cfg, st);
  if (gate) {
    const std::uint32_t maj = static_cast<std::uint32_t>(s.size()) / 2 + 1;
    std::map<Bytes, std::uint32_t> star_tally;
    bool all_star_done = true;
    for (auto i : s) {
      if (st.rbc_out[i].has_value()) {
        ++star_tally[*st.rbc_out[i]];
      } else {
        all_star_done = false;
      }
    }
    for (const auto& [v, cnt] : star_tally) {
      if (cnt >= maj) {
        c.c2 = v;
        break;
      }
    }
    c.c3 = all_star_done;
  }
  return c;
}

Bytes encode_bytes_set(const std::vector<Bytes>& values) {
  enc::Writer w;
  w.tag(enc::Tag::BytesSet);
  std::vector<Bytes> elems;
  elems.reserve(values.size());
  for (const auto& v : values) {
    enc::Writer e;
    e.bytes(v);
    elems.push_back(e.take());
  }
  w.set_of(std::move(elems));
  return w.take();
}

std::optional<std::vector<Bytes>> decode_bytes_set(const Bytes& body) {
  enc::Reader r(body);
  std::uint8_t tag = 0;
  if (!r.u8(tag) || tag != static_cast<std::uint8_t>(enc::Tag::BytesSet)) return std::nullopt;
  std::uint64_t n = 0;
  if (!r.count(n)) return std::nullopt;
  std::vector<Bytes> out;
  for (std::uint64_t i = 0; i < n; ++i) {
    Bytes v;
    if (!r.bytes(v)) return std::nullopt;
    out.push_back(std::move(v));
  }
  if (!r.done()) return std::nullopt;
  return out;
}

std::string aba_status_string(const State& st, std::uint32_t n) {
  std::string s;
  for (std::uint32_t i = 1; i <= n && i < st.abas.size(); ++i) {
    const auto& a = st.abas[i];
    if (a.decided.has_value()) {
      s += 'd';
    } else if (a.halted) {
      s += 'h';
    } else if (a.started) {
      s += 'r';
    } else {
      s += 'u';
    }
  }
  return s;
}

}  // namespace nasmr::acs
