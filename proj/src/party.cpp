#include "nasmr/party.hpp"

#include "nasmr/smr.hpp"

namespace nasmr {

namespace {

Bytes input_for(const ScenarioConfig& sc, PartyId p) {
  auto it = sc.inputs.find(p);
  return it != sc.inputs.end() ? it->second : default_input_payload(p);
}

bool bit_for(const ScenarioConfig& sc, PartyId p) {
  auto it = sc.bits.find(p);
  if (it == sc.bits.end()) throw ConfigError("bits missing for party " + std::to_string(p));
  return it->second;
}

void emit_broadcasts(const std::vector<ProtocolMessage>& msgs, Effects& fx) {
  for (const auto& m : msgs) fx.broadcast(m);
}

// Collects the slot-1 (B, Sigma) accumulator for the standalone gc/bla
// scenarios, mirroring the SMR slot preamble.
struct PairCollector {
  Pair acc;
  std::set<PartyId> seen;
  bool accumulating = true;

  void absorb(const PartyEnv& env, PartyId from, const BufferMsg& bm) {
    if (bm.sb.signer != from) return;
    if (!env.ledger->verify(from, buffer_tag(env.session, 1), bm.sb.buffer.encode_body(),
                            bm.sb.sig)) {
      return;
    }
    if (!seen.insert(from).second) return;
    if (accumulating && acc.sigma().size() <= env.params.t_s) {
      acc.mutable_block().merge(bm.sb.buffer);
      acc.add_signed_buffer(bm.sb);
      if (acc.sigma().size() > env.params.t_s) accumulating = false;
    }
  }

  ProtocolMessage own_buffer(const PartyEnv& env, const Bytes& payload) {
    SignedBuffer sb;
    sb.signer = env.self;
    sb.buffer = Block::single(payload);
    sb.sig = env.signer.sign(buffer_tag(env.session, 1), sb.buffer.encode_body());
    ProtocolMessage m;
    m.ctx = MsgContext{1, 0, 0};
    m.body = BufferMsg{std::move(sb)};
    return m;
  }
};

class RbcParty final : public IParty {
 public:
  explicit RbcParty(const PartyEnv& env)
      : env_(env), cfg_{env.params, env.self, env.scenario->rbc_sender, 1} {}

  void start(Effects& fx) override {
    std::optional<Bytes> input;
    if (env_.self == cfg_.sender) input = input_for(*env_.scenario, env_.self);
    emit_broadcasts(rbc::init(cfg_, st_, input).broadcasts, fx);
  }

  void on_message(PartyId from, const ProtocolMessage& m, Effects& fx) override {
    if (m.ctx.slot != 1 || m.ctx.inst != cfg_.sender) return;
    auto out = rbc::handle(cfg_, st_, from, m);
    emit_broadcasts(out.broadcasts, fx);
    if (out.output_now) {
      fx.output("rbc", *st_.output, "sender=" + std::to_string(cfg_.sender));
    }
  }

  void on_wake(Time, Effects&) override {}
  void on_leader(Slot, std::uint64_t, PartyId, Effects&) override {}
  void on_coin(Slot, std::uint64_t, std::uint64_t, bool, Effects&) override {}
  void on_transaction(const Bytes&, Effects&) override {}

  Digest state_digest() const override {
    enc::Writer w;
    w.u8(st_.terminated ? 1 : 0);
    if (st_.output) w.bytes(*st_.output);
    return sha256(w.data());
  }
  std::string summary_note() const override {
    return st_.terminated ? "rbc terminated=1" : "rbc terminated=0";
  }

 private:
  PartyEnv env_;
  rbc::Config cfg_;
  rbc::State st_;
};

class AbaParty final : public IParty {
 public:
  explicit AbaParty(const PartyEnv& env) : env_(env), cfg_{env.params, env.self, 1, 1} {}

  void start(Effects& fx) override {
    emit(aba::init(cfg_, st_, bit_for(*env_.scenario, env_.self)), fx);
  }

  void on_message(PartyId from, const ProtocolMessage& m, Effects& fx) override {
    if (m.ctx.slot != 1 || m.ctx.inst != 1) return;
    emit(aba::handle(cfg_, st_, from, m), fx);
  }

  void on_coin(Slot slot, std::uint64_t index, std::uint64_t round, bool value,
               Effects& fx) override {
    if (slot != 1 || index != 1) return;
    emit(aba::on_coin(cfg_, st_, round, value), fx);
  }

  void on_wake(Time, Effects&) override {}
  void on_leader(Slot, std::uint64_t, PartyId, Effects&) override {}
  void on_transaction(const Bytes&, Effects&) override {}

  Digest state_digest() const override {
    enc::Writer w;
    w.u8(st_.decided.has_value() ? (*st_.decided ? 2 : 1) : 0);
    w.u64(st_.decided_round);
    return sha256(w.data());
  }
  std::string summary_note() const override {
    std::string s = "abastates=";
    s += st_.decided.has_value() ? 'd' : (st_.halted ? 'h' : (st_.started ? 'r' : 'u'));
    s += " round=" + std::to_string(st_.round);
    return s;
  }

 private:
  void emit(const aba::Out& out, Effects& fx) {
    emit_broadcasts(out.broadcasts, fx);
    for (auto r : out.coin_requests) fx.request_coin(1, 1, r);
    if (out.decided_now) {
      fx.output("aba", Bytes{static_cast<std::uint8_t>(*st_.decided ? 1 : 0)},
                "r=" + std::to_string(st_.decided_round));
    }
  }

  PartyEnv env_;
  aba::Config cfg_;
  aba::State st_;
};

class AcsParty final : public IParty {
 public:
  explicit AcsParty(const PartyEnv& env) : env_(env), cfg_{env.params, env.self, 1} {}

  void start(Effects& fx) override {
    Bytes input = Block::single(input_for(*env_.scenario, env_.self)).encode_body();
    emit(acs::init(cfg_, st_, std::move(input)), fx);
  }

  void on_message(PartyId from, const ProtocolMessage& m, Effects& fx) override {
    if (m.ctx.slot != 1) return;
    emit(acs::handle(cfg_, st_, from, m), fx);
  }

  void on_coin(Slot slot, std::uint64_t index, std::uint64_t round, bool value,
               Effects& fx) override {
    if (slot != 1) return;
    emit(acs::on_coin(cfg_, st_, index, round, value), fx);
  }

  void on_wake(Time, Effects&) override {}
  void on_leader(Slot, std::uint64_t, PartyId, Effects&) override {}
  void on_transaction(const Bytes&, Effects&) override {}

  Digest state_digest() const override {
    enc::Writer w;
    w.u8(st_.output.has_value() ? 1 : 0);
    if (st_.output) w.raw(acs::encode_bytes_set(*st_.output));
    w.u64(st_.exit_taken);
    return sha256(w.data());
  }
  std::string summary_note() const override {
    return "abastates=" + acs::aba_status_string(st_, env_.params.n) +
           " exit=" + std::to_string(st_.exit_taken);
  }

 private:
  void emit(const acs::Out& out, Effects& fx) {
    emit_broadcasts(out.broadcasts, fx);
    for (const auto& c : out.coin_requests) fx.request_coin(1, c.index, c.round);
    for (const auto& n : out.notes) fx.note(n);
    if (out.output_now) {
      fx.output("acs", acs::encode_bytes_set(*st_.output),
                "exit=" + std::to_string(st_.exit_taken));
    }
  }

  PartyEnv env_;
  acs::Config cfg_;
  acs::State st_;
};

class GcParty final : public IParty {
 public:
  explicit GcParty(const PartyEnv& env)
      : env_(env),
        cfg_{env.params, env.self, 1, 1, env.session, env.signer, env.ledger} {}

  void start(Effects& fx) override {
    fx.broadcast(collector_.own_buffer(env_, input_for(*env_.scenario, env_.self)));
    for (int u = 0; u <= 5; ++u) fx.wake_at(env_.delta * (1 + u));
  }

  void on_wake(Time now, Effects& fx) override {
    const Time rel = now - env_.delta;
    if (rel < 0 || rel % env_.delta != 0) return;
    const int u = static_cast<int>(rel / env_.delta);
    if (u == 0) {
      started_ = true;
      emit(bla::gc_start(cfg_, st_, Vote{0, collector_.acc, Certificate{}}), fx);
    } else if (u <= 5 && started_) {
      emit(bla::gc_step(cfg_, st_, u), fx);
    }
  }

  void on_message(PartyId from, const ProtocolMessage& m, Effects& fx) override {
    if (const auto* bm = std::get_if<BufferMsg>(&m.body)) {
      collector_.absorb(env_, from, *bm);
      return;
    }
    if (!started_ || m.ctx.slot != 1 || m.ctx.round != 1) return;
    emit(bla::gc_handle(cfg_, st_, from, m), fx);
  }

  void on_leader(Slot slot, std::uint64_t k, PartyId leader, Effects& fx) override {
    if (slot != 1 || k != 1 || !started_) return;
    emit(bla::gc_on_leader(cfg_, st_, leader), fx);
  }

  void on_coin(Slot, std::uint64_t, std::uint64_t, bool, Effects&) override {}
  void on_transaction(const Bytes&, Effects&) override {}

  Digest state_digest() const override {
    enc::Writer w;
    if (st_.output.has_value()) {
      w.u64(static_cast<std::uint64_t>(st_.output->grade));
      if (st_.output->pair) w.raw(st_.output->pair->encode_body());
    }
    return sha256(w.data());
  }
  std::string summary_note() const override {
    if (!st_.output) return "gc grade=none";
    return "gc grade=" + std::to_string(st_.output->grade);
  }

 private:
  void emit(const bla::GcOut& out, Effects& fx) {
    for (const auto& [dst, m] : out.sends) fx.send(dst, m);
    emit_broadcasts(out.broadcasts, fx);
    if (out.request_leader) fx.request_leader(1, 1);
    if (out.output_now && st_.output) {
      Bytes payload;
      if (st_.output->pair) payload = st_.output->pair->encode_body();
      fx.output("gc", payload, "grade=" + std::to_string(st_.output->grade));
      if (st_.anomaly_no_leader) fx.note("gc-anomaly no-leader-by-4d");
    }
  }

  PartyEnv env_;
  bla::GcConfig cfg_;
  bla::GcState st_;
  PairCollector collector_;
  bool started_ = false;
};

class BlaParty final : public IParty {
 public:
  explicit BlaParty(const PartyEnv& env)
      : env_(env), cfg_{env.params, env.self, 1, env.session, env.signer, env.ledger} {}

  void start(Effects& fx) override {
    fx.broadcast(collector_.own_buffer(env_, input_for(*env_.scenario, env_.self)));
    const std::uint64_t steps = 5ull * env_.params.kappa;
    for (std::uint64_t u = 0; u <= steps; ++u) fx.wake_at(env_.delta * (1 + static_cast<Time>(u)));
  }

  void on_wake(Time now, Effects& fx) override {
    const Time rel = now - env_.delta;
    if (rel < 0 || rel % env_.delta != 0) return;
    const std::uint64_t u = static_cast<std::uint64_t>(rel / env_.delta);
    if (u == 0) {
      started_ = true;
      emit(bla::bla_start(cfg_, st_, collector_.acc), fx);
    } else if (started_ && u <= 5ull * env_.params.kappa) {
      emit(bla::bla_step(cfg_, st_, u), fx);
    }
  }

  void on_message(PartyId from, const ProtocolMessage& m, Effects& fx) override {
    if (const auto* bm = std::get_if<BufferMsg>(&m.body)) {
      collector_.absorb(env_, from, *bm);
      return;
    }
    if (!started_ || m.ctx.slot != 1) return;
    emit(bla::bla_handle(cfg_, st_, from, m), fx);
  }

  void on_leader(Slot slot, std::uint64_t k, PartyId leader, Effects& fx) override {
    if (slot != 1 || !started_) return;
    emit(bla::bla_on_leader(cfg_, st_, k, leader), fx);
  }

  void on_coin(Slot, std::uint64_t, std::uint64_t, bool, Effects&) override {}
  void on_transaction(const Bytes&, Effects&) override {}

  Digest state_digest() const override {
    enc::Writer w;
    w.u8(st_.output.has_value() ? 1 : 0);
    if (st_.output) {
      w.raw(st_.output->encode_body());
      w.u64(st_.output_iter);
    }
    return sha256(w.data());
  }
  std::string summary_note() const override {
    std::string s = "bla out=" + std::string(st_.output ? "1" : "0");
    s += " iter=" + std::to_string(st_.output_iter);
    s += " grades=";
    for (std::size_t i = 0; i < st_.grades.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(st_.grades[i]);
    }
    return s;
  }

 private:
  void emit(const bla::BlaOut& out, Effects& fx) {
    for (const auto& [dst, m] : out.sends) fx.send(dst, m);
    emit_broadcasts(out.broadcasts, fx);
    if (out.request_leader) fx.request_leader(1, st_.iter);
    if (out.output_now && st_.output) {
      fx.output("bla", st_.output->encode_body(), "iter=" + std::to_string(st_.output_iter));
    }
  }

  PartyEnv env_;
  bla::BlaConfig cfg_;
  bla::BlaState st_;
  PairCollector collector_;
  bool started_ = false;
};

smr::Config smr_config(const PartyEnv& env, Time start_time) {
  smr::Config c;
  c.params = env.params;
  c.self = env.self;
  c.session = env.session;
  c.delta = env.delta;
  c.start_time = start_time;
  c.slot_limit = env.scenario->slots;
  c.signer = env.signer;
  c.ledger = env.ledger;
  return c;
}

class SmrParty final : public IParty {
 public:
  explicit SmrParty(const PartyEnv& env) : env_(env), core_(smr_config(env, 0)) {}

  void start(Effects& fx) override {
    smr::Out out;
    for (Time t : core_.wake_times()) {
      if (t == 0) {
        core_.on_wake(0, out);
      } else {
        fx.wake_at(t);
      }
    }
    emit(out, fx);
  }

  void on_wake(Time now, Effects& fx) override {
    smr::Out out;
    core_.on_wake(now, out);
    emit(out, fx);
  }

  void on_message(PartyId from, const ProtocolMessage& m, Effects& fx) override {
    smr::Out out;
    core_.on_message(from, m, out);
    emit(out, fx);
  }

  void on_leader(Slot slot, std::uint64_t k, PartyId leader, Effects& fx) override {
    smr::Out out;
    core_.on_leader(slot, k, leader, out);
    emit(out, fx);
  }

  void on_coin(Slot slot, std::uint64_t index, std::uint64_t round, bool value,
               Effects& fx) override {
    smr::Out out;
    core_.on_coin(slot, index, round, value, out);
    emit(out, fx);
  }

  void on_transaction(const Bytes& payload, Effects& fx) override {
    (void)fx;
    core_.on_transaction(payload);
  }

  Digest state_digest() const override { return core_.state_digest(); }
  std::string summary_note() const override { return core_.summary(); }

 private:
  void emit(const smr::Out& out, Effects& fx) {
    for (const auto& [dst, m] : out.sends) fx.send(dst, m);
    emit_broadcasts(out.broadcasts, fx);
    for (const auto& r : out.leader_reqs) fx.request_leader(r.slot, r.k);
    for (const auto& r : out.coin_reqs) fx.request_coin(r.slot, r.index, r.round);
    for (Slot k : out.epochs_entered) fx.epoch_entered(k);
    for (const auto& [k, blk] : out.blocks_out) {
      fx.output("smr-block", blk.encode_body(), "slot=" + std::to_string(k));
    }
    for (const auto& n : out.notes) fx.note(n);
  }

  PartyEnv env_;
  smr::Core core_;
};

class WbaParty final : public IParty {
 public:
  explicit WbaParty(const PartyEnv& env)
      : env_(env), wba_(smr_config(env, env.delta), bit_for(*env.scenario, env.self)) {}

  void start(Effects& fx) override {
    smr::Out out;
    wba_.start(out);
    for (Time t : wba_.wake_times()) fx.wake_at(t);
    emit(out, fx);
  }

  void on_wake(Time now, Effects& fx) override {
    smr::Out out;
    wba_.on_wake(now, out);
    emit(out, fx);
  }

  void on_message(PartyId from, const ProtocolMessage& m, Effects& fx) override {
    smr::Out out;
    wba_.on_message(from, m, out);
    emit(out, fx);
  }

  void on_leader(Slot slot, std::uint64_t k, PartyId leader, Effects& fx) override {
    smr::Out out;
    wba_.on_leader(slot, k, leader, out);
    emit(out, fx);
  }

  void on_coin(Slot slot, std::uint64_t index, std::uint64_t round, bool value,
               Effects& fx) override {
    smr::Out out;
    wba_.on_coin(slot, index, round, value, out);
    emit(out, fx);
  }

  void on_transaction(const Bytes&, Effects&) override {}

  Digest state_digest() const override { return wba_.state_digest(); }
  std::string summary_note() const override { return wba_.summary(); }

 private:
  void emit(const smr::Out& out, Effects& fx) {
    for (const auto& [dst, m] : out.sends) fx.send(dst, m);
    emit_broadcasts(out.broadcasts, fx);
    for (const auto& r : out.leader_reqs) fx.request_leader(r.slot, r.k);
    for (const auto& r : out.coin_reqs) fx.request_coin(r.slot, r.index, r.round);
    for (Slot k : out.epochs_entered) fx.epoch_entered(k);
    for (const auto& [k, blk] : out.blocks_out) {
      fx.output("smr-block", blk.encode_body(), "slot=" + std::to_string(k));
    }
    for (const auto& n : out.notes) fx.note(n);
    if (wba_.output_now) {
      fx.output("wba", Bytes{static_cast<std::uint8_t>(*wba_.output() ? 1 : 0)}, "");
    }
  }

  PartyEnv env_;
  smr::Wba wba_;
};

}  // namespace

Bytes default_input_payload(PartyId p) {
  return to_bytes("tx-p" + std::to_string(p));
}

bool protocol_known(const std::string& protocol) {
  return protocol == "rbc" || protocol == "aba" || protocol == "acs" || protocol == "gc" ||
         protocol == "bla" || protocol == "smr" || protocol == "wba";
}

std::unique_ptr<IParty> make_party(const std::string& protocol, const PartyEnv& env) {
  if (protocol == "rbc") return std::make_unique<RbcParty>(env);
  if (protocol == "aba") return std::make_unique<AbaParty>(env);
  if (protocol == "acs") return std::make_unique<AcsParty>(env);
  if (protocol == "gc") return std::make_unique<GcParty>(env);
  if (protocol == "bla") return std::make_unique<BlaParty>(env);
  if (protocol == "smr") return std::make_unique<SmrParty>(env);
  if (protocol == "wba") return std::make_unique<WbaParty>(env);
  throw ConfigError("unknown protocol: " + protocol);
}

PartyFactory party_factory(const std::string& protocol) {
  return [protocol](const PartyEnv& env) { return make_party(protocol, env); };
}

}  // namespace nasmr
