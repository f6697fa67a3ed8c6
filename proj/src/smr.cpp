#include "nasmr/smr.hpp"

#include <algorithm>

namespace nasmr::smr {

namespace {

bla::BlaConfig bla_config(const Config& cfg, Slot k) {
  return bla::BlaConfig{cfg.params, cfg.self, k, cfg.session, cfg.signer, cfg.ledger};
}

acs::Config acs_config(const Config& cfg, Slot k) {
  return acs::Config{cfg.params, cfg.self, k};
}

}  // namespace

std::vector<Time> Core::wake_times() const {
  std::vector<Time> times;
  for (Slot k = 1; k <= cfg_.slot_limit; ++k) {
    times.push_back(cfg_.slot_start(k));
    const Time s = cfg_.bla_start(k);
    for (std::uint64_t u = 0; u <= 5ull * cfg_.params.kappa; ++u) {
      times.push_back(s + static_cast<Time>(u) * cfg_.delta);
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

SlotRuntime& Core::slot(Slot k) {
  auto it = slots_.find(k);
  if (it == slots_.end()) {
    it = slots_.emplace(k, SlotRuntime{}).first;
    it->second.k = k;
  }
  return it->second;
}

void Core::on_wake(Time now, Out& out) {
  for (Slot k = 1; k <= cfg_.slot_limit; ++k) {
    if (now == cfg_.slot_start(k)) slot_start(k, out);
    const Time rel = now - cfg_.bla_start(k);
    if (rel >= 0 && rel <= cfg_.bla_duration() && rel % cfg_.delta == 0) {
      const std::uint64_t u = static_cast<std::uint64_t>(rel / cfg_.delta);
      if (u == 0) {
        bla_begin(k, out);
      } else {
        SlotRuntime& rt = slot(k);
        if (rt.bla_started) {
          merge_bla(k, bla::bla_step(bla_config(cfg_, k), rt.bla, u), out);
          check_bla_output(k, out);
        }
      }
      if (now == cfg_.bla_deadline(k)) bla_deadline(k, out);
    }
  }
}

void Core::slot_start(Slot k, Out& out) {
  SlotRuntime& rt = slot(k);
  if (rt.started) throw WriteOnceError("slot already started");
  rt.started = true;
  epochs_.enter(k);
  out.epochs_entered.push_back(k);

  Block snapshot = buffer_;
  SignedBuffer sb;
  sb.signer = cfg_.self;
  sb.buffer = std::move(snapshot);
  sb.sig = cfg_.signer.sign(buffer_tag(cfg_.session, k), sb.buffer.encode_body());
  ProtocolMessage m;
  m.ctx = MsgContext{k, 0, 0};
  m.body = BufferMsg{std::move(sb)};
  out.broadcasts.push_back(std::move(m));
}

void Core::bla_begin(Slot k, Out& out) {
  SlotRuntime& rt = slot(k);
  if (rt.bla_started) return;
  rt.bla_started = true;
  // The accumulator keeps growing (until |Sigma| > t_s) for the deadline
  // fallback; BLA runs on a snapshot taken now.
  if (rt.acc.sigma().size() <= cfg_.params.t_s) {
    out.notes.push_back("sigma-low slot=" + std::to_string(k) +
                        " size=" + std::to_string(rt.acc.sigma().size()));
  }
  merge_bla(k, bla::bla_start(bla_config(cfg_, k), rt.bla, rt.acc), out);
  check_bla_output(k, out);
}

void Core::bla_deadline(Slot k, Out& out) {
  SlotRuntime& rt = slot(k);
  if (!rt.bstar_set) {
    rt.bstar_set = true;
    rt.bstar = rt.acc.block().encode_body();
    out.notes.push_back("bla-timeout slot=" + std::to_string(k));
    start_acs(k, rt.bstar, out);
  }
}

void Core::check_bla_output(Slot k, Out& out) {
  SlotRuntime& rt = slot(k);
  if (!rt.bla.output.has_value() || rt.bla_output_taken) return;
  rt.bla_output_taken = true;
  out.bla_outputs.emplace_back(k, *rt.bla.output);
  const crypto::Verifier v{cfg_.ledger, cfg_.session, k};
  if (!rt.bstar_set && pair_is_valid(*rt.bla.output, cfg_.params.t_s, v)) {
    rt.bstar_set = true;
    rt.bstar = rt.bla.output->block().encode_body();
    start_acs(k, rt.bstar, out);
  }
}

void Core::start_acs(Slot k, Bytes input, Out& out) {
  SlotRuntime& rt = slot(k);
  if (rt.acs_started) return;
  rt.acs_started = true;
  merge_acs(k, acs::init(acs_config(cfg_, k), rt.acs, std::move(input)), out);
  while (!rt.pending_acs.empty()) {
    auto [from, msg] = rt.pending_acs.front();
    rt.pending_acs.pop_front();
    merge_acs(k, acs::handle(acs_config(cfg_, k), rt.acs, from, msg), out);
  }
  check_acs_output(k, out);
}

void Core::check_acs_output(Slot k, Out& out) {
  SlotRuntime& rt = slot(k);
  if (!rt.acs.output.has_value() || rt.block_written) return;
  rt.block_written = true;
  Block blk;
  for (const Bytes& v : *rt.acs.output) {
    enc::Reader r(v);
    auto b = Block::decode_body(r);
    // Values that are not block encodings (possible only from corrupted
    // senders) contribute nothing; this is the same at every honest party.
    if (b && r.done()) blk.merge(*b);
  }
  blocks_.write(k, blk, epochs_);
  buffer_.remove_all(blk);
  out.blocks_out.emplace_back(k, std::move(blk));
  out.notes.push_back("acs-exit slot=" + std::to_string(k) +
                      " exit=" + std::to_string(rt.acs.exit_taken));
}

void Core::merge_bla(Slot k, bla::BlaOut&& child, Out& out) {
  for (auto& s : child.sends) out.sends.push_back(std::move(s));
  for (auto& b : child.broadcasts) out.broadcasts.push_back(std::move(b));
  if (child.request_leader) out.leader_reqs.push_back({k, slot(k).bla.iter});
}

void Core::merge_acs(Slot k, acs::Out&& child, Out& out) {
  for (auto& b : child.broadcasts) out.broadcasts.push_back(std::move(b));
  for (auto& c : child.coin_requests) out.coin_reqs.push_back({k, c.index, c.round});
  for (auto& n : child.notes) out.notes.push_back(n + " slot=" + std::to_string(k));
}

void Core::on_message(PartyId from, const ProtocolMessage& m, Out& out) {
  const Slot k = m.ctx.slot;
  if (k == 0 || k > cfg_.slot_limit) return;
  SlotRuntime& rt = slot(k);

  switch (m.kind()) {
    case MsgKind::Buffer: {
      const auto& bm = std::get<BufferMsg>(m.body);
      if (bm.sb.signer != from) return;  // authenticated channels
      if (!cfg_.ledger->verify(from, buffer_tag(cfg_.session, k), bm.sb.buffer.encode_body(),
                               bm.sb.sig)) {
        return;
      }
      if (!rt.buf_seen.insert(from).second) return;  // first per sender
      if (rt.accumulating && rt.acc.sigma().size() <= cfg_.params.t_s) {
        rt.acc.mutable_block().merge(bm.sb.buffer);
        rt.acc.add_signed_buffer(bm.sb);
        if (rt.acc.sigma().size() > cfg_.params.t_s) rt.accumulating = false;
      }
      return;
    }
    case MsgKind::Status:
    case MsgKind::Propose:
    case MsgKind::Commit:
    case MsgKind::Notify: {
      if (!rt.bla_started) return;
      merge_bla(k, bla::bla_handle(bla_config(cfg_, k), rt.bla, from, m), out);
      check_bla_output(k, out);
      return;
    }
    case MsgKind::RbcValue:
    case MsgKind::RbcEcho:
    case MsgKind::RbcReady:
    case MsgKind::AbaEst:
    case MsgKind::AbaAux:
    case MsgKind::AbaDone: {
      if (!rt.acs_started) {
        rt.pending_acs.emplace_back(from, m);
        return;
      }
      merge_acs(k, acs::handle(acs_config(cfg_, k), rt.acs, from, m), out);
      check_acs_output(k, out);
      return;
    }
    default:
      return;
  }
}

void Core::on_transaction(const Bytes& payload) {
  buffer_.insert(Transaction::make(payload));
}

void Core::on_leader(Slot s, std::uint64_t k, PartyId leader, Out& out) {
  if (s == 0 || s > cfg_.slot_limit) return;
  SlotRuntime& rt = slot(s);
  if (!rt.bla_started) return;
  merge_bla(s, bla::bla_on_leader(bla_config(cfg_, s), rt.bla, k, leader), out);
  check_bla_output(s, out);
}

void Core::on_coin(Slot s, std::uint64_t index, std::uint64_t round, bool value, Out& out) {
  if (s == 0 || s > cfg_.slot_limit) return;
  SlotRuntime& rt = slot(s);
  if (!rt.acs_started) return;  // coin cached at the oracle; ABA re-requests
  merge_acs(s, acs::on_coin(acs_config(cfg_, s), rt.acs, index, round, value), out);
  check_acs_output(s, out);
}

Digest Core::state_digest() const {
  enc::Writer w;
  w.u64(epochs_.last());
  for (const auto& [k, blk] : blocks_.all()) {
    w.u64(k);
    w.raw(blk.encode_body());
  }
  w.raw(buffer_.encode_body());
  return sha256(w.data());
}

std::string Core::summary() const {
  std::string s = "slots-completed=" + std::to_string(blocks_.all().size());
  for (const auto& [k, rt] : slots_) {
    if (!rt.started) continue;
    s += " slot" + std::to_string(k) + "=";
    s += rt.acs_started ? acs::aba_status_string(rt.acs, cfg_.params.n) : std::string("pre-acs");
  }
  return s;
}

// ---- WBA ----

Bytes wba_tx_payload(PartyId signer, bool v, const Signature& sig) {
  enc::Writer w;
  w.tag(enc::Tag::WbaValue);
  w.u64(signer);
  w.u8(v ? 1 : 0);
  w.raw(Bytes(sig.token.bytes.begin(), sig.token.bytes.end()));
  return w.take();
}

std::optional<WbaTx> parse_wba_tx(const Bytes& payload) {
  enc::Reader r(payload);
  std::uint8_t tag = 0;
  if (!r.u8(tag) || tag != static_cast<std::uint8_t>(enc::Tag::WbaValue)) return std::nullopt;
  WbaTx tx;
  std::uint64_t signer = 0;
  std::uint8_t bit = 0;
  if (!r.u64(signer) || !r.u8(bit) || bit > 1) return std::nullopt;
  tx.signer = static_cast<PartyId>(signer);
  tx.v = (bit == 1);
  for (auto& b : tx.sig.token.bytes) {
    if (!r.u8(b)) return std::nullopt;
  }
  if (!r.done()) return std::nullopt;
  return tx;
}

Wba::Wba(Config smr_cfg, bool input) : core_(std::move(smr_cfg)), input_(input) {}

void Wba::start(Out& out) {
  const Config& cfg = core_.config();
  WbaValueMsg m;
  m.signer = cfg.self;
  m.v = input_;
  m.sig = cfg.signer.sign(wba_value_tag(cfg.session), wba_value_sign_payload(input_));
  ProtocolMessage pm;
  pm.ctx = MsgContext{0, 0, 0};
  pm.body = m;
  out.broadcasts.push_back(std::move(pm));
}

void Wba::on_wake(Time now, Out& out) {
  core_.on_wake(now, out);
  absorb_blocks(out);
}

void Wba::on_message(PartyId from, const ProtocolMessage& m, Out& out) {
  output_now = false;
  if (const auto* wv = std::get_if<WbaValueMsg>(&m.body)) {
    (void)from;  // the signature, not the channel, authenticates the value
    const Config& cfg = core_.config();
    if (wv->signer == 0 || wv->signer > cfg.params.n) return;
    if (!cfg.ledger->verify(wv->signer, wba_value_tag(cfg.session),
                            wba_value_sign_payload(wv->v), wv->sig)) {
      return;
    }
    core_.on_transaction(wba_tx_payload(wv->signer, wv->v, wv->sig));
    return;
  }
  core_.on_message(from, m, out);
  absorb_blocks(out);
}

void Wba::on_leader(Slot slot, std::uint64_t k, PartyId leader, Out& out) {
  core_.on_leader(slot, k, leader, out);
  absorb_blocks(out);
}

void Wba::on_coin(Slot slot, std::uint64_t index, std::uint64_t round, bool value, Out& out) {
  core_.on_coin(slot, index, round, value, out);
  absorb_blocks(out);
}

void Wba::absorb_blocks(Out& out) {
  output_now = false;
  const Config& cfg = core_.config();
  for (const auto& [slot, blk] : out.blocks_out) {
    for (const auto& tx : blk.txs()) {
      auto wtx = parse_wba_tx(tx.payload);
      if (!wtx) continue;
      if (wtx->signer == 0 || wtx->signer > cfg.params.n) continue;
      if (values_.count(wtx->signer)) continue;  // no (*, j) already in V
      if (!cfg.ledger->verify(wtx->signer, wba_value_tag(cfg.session),
                              wba_value_sign_payload(wtx->v), wtx->sig)) {
        continue;
      }
      values_.emplace(wtx->signer, wtx->v);
    }
  }
  if (!output_.has_value() && values_.size() >= cfg.params.n - cfg.params.t_s) {
    std::size_t ones = 0;
    for (const auto& [p, v] : values_) {
      if (v) ++ones;
    }
    // Majority of the values in V; an exact tie (possible only with corrupted
    // contributions) resolves to 0.
    output_ = ones * 2 > values_.size();
    output_now = true;
  }
}

Digest Wba::state_digest() const {
  enc::Writer w;
  w.u8(output_.has_value() ? (*output_ ? 2 : 1) : 0);
  for (const auto& [p, v] : values_) {
    w.u64(p);
    w.u8(v ? 1 : 0);
  }
  w.raw(core_.state_digest().to_bytes());
  return sha256(w.data());
}

std::string Wba::summary() const {
  std::string s = "wba v-size=" + std::to_string(values_.size());
  s += output_.has_value() ? (*output_ ? " out=1" : " out=0") : " out=none";
  s += " ";
  s += core_.summary();
  return s;
}

}  // namespace nasmr::smr
