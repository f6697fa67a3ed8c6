#include "nasmr/simnet.hpp"

#include <algorithm>
#include <stdexcept>

namespace nasmr {

ScheduleDecision Strategy::schedule(const Envelope& e, AdvCtx& a) {
  (void)a;
  return {e.send_time + 1, 0};
}

std::uint64_t leader_instance_id(Slot slot, std::uint64_t k) {
  return (slot << 20) | (k & 0xfffff);
}

std::uint64_t coin_instance_id(Slot slot, std::uint64_t index) {
  return (slot << 20) | (index & 0xfffff);
}

namespace {

enum class EvKind { ScheduledCorrupt, Deliver, Tx, Start, Wake, OracleLeader, OracleCoin, AdvWake };

constexpr int kPhaseCorrupt = -1;
constexpr int kPhaseDeliver = 0;
constexpr int kPhaseWake = 1;
constexpr int kPhaseOracle = 2;
constexpr int kPhaseAdvWake = 3;

struct Ev {
  Time t = 0;
  int phase = 0;
  std::uint64_t prio = 0;
  std::uint64_t seq = 0;
  EvKind kind = EvKind::Wake;
  std::size_t env_index = 0;
  PartyId party = 0;
  Bytes tx_payload;
  Slot slot = 0;
  std::uint64_t a = 0;  // leader k / coin index
  std::uint64_t b = 0;  // coin round
  std::uint64_t value = 0;

  bool operator<(const Ev& o) const {
    if (t != o.t) return t < o.t;
    if (phase != o.phase) return phase < o.phase;
    if (prio != o.prio) return prio < o.prio;
    return seq < o.seq;
  }
};

}  // namespace

struct Simulation::Impl final : AdvCtx {
  ScenarioConfig cfg;
  PartyFactory factory;
  std::unique_ptr<Strategy> strategy;

  crypto::Ledger sig_ledger;
  crypto::LeaderOracle leader_oracle;
  crypto::CoinOracle coin_oracle;
  crypto::AdversarySigner adv_signer;
  Rng adv_rng;
  TranscriptWriter tw;

  std::vector<std::unique_ptr<IParty>> parties;  // [1..n]; index 0 null
  std::vector<std::unique_ptr<Effects>> fx;      // per party
  std::set<PartyId> corrupted_set;

  std::set<Ev> queue;
  std::uint64_t ev_seq = 0;
  std::vector<Envelope> envelopes;
  std::vector<std::size_t> pending;  // envelope ids awaiting scheduling
  std::set<std::pair<PartyId, Time>> wakes_registered;
  std::set<Time> adv_wakes_registered;
  Time now_ = 0;

  class PartyFx final : public Effects {
   public:
    PartyFx(Impl* impl, PartyId self) : impl_(impl), self_(self) {}
    void send(PartyId dst, const ProtocolMessage& m) override { impl_->submit(self_, dst, m); }
    void broadcast(const ProtocolMessage& m) override {
      for (PartyId d = 1; d <= impl_->cfg.params.n; ++d) impl_->submit(self_, d, m);
    }
    void wake_at(Time t) override { impl_->register_wake(self_, t); }
    void request_leader(Slot slot, std::uint64_t k) override {
      impl_->do_request_leader(self_, slot, k);
    }
    void request_coin(Slot slot, std::uint64_t index, std::uint64_t round) override {
      impl_->do_request_coin(self_, slot, index, round);
    }
    void output(const std::string& what, const Bytes& payload, const std::string& note) override {
      impl_->tw.add(impl_->now_, RecordKind::Output, self_, 0, payload,
                    note.empty() ? what : what + " " + note);
    }
    void epoch_entered(Slot j) override {
      enc::Writer w;
      w.u64(j);
      impl_->tw.add(impl_->now_, RecordKind::Epoch, self_, 0, w.take(),
                    "slot=" + std::to_string(j));
    }
    void note(const std::string& text) override {
      impl_->tw.add(impl_->now_, RecordKind::Note, self_, 0, {}, text);
    }
    Time now() const override { return impl_->now_; }

   private:
    Impl* impl_;
    PartyId self_;
  };

  Impl(const ScenarioConfig& c, PartyFactory f, std::unique_ptr<Strategy> s)
      : cfg(c),
        factory(std::move(f)),
        strategy(std::move(s)),
        sig_ledger(c.params.n),
        leader_oracle(c.params.n, Rng(c.net.seed, "leader-oracle")),
        coin_oracle(c.params.t_a + 1, Rng(c.net.seed, "coin-oracle")),
        adv_signer(sig_ledger.adversary_signer()),
        adv_rng(c.net.seed, "adversary") {}

  // ---- AdvCtx ----
  Time now() const override { return now_; }
  const ScenarioConfig& scenario() const override { return cfg; }
  Rng& rng() override { return adv_rng; }
  bool is_corrupted(PartyId p) const override { return corrupted_set.count(p) != 0; }
  std::uint32_t budget_left() const override {
    return cfg.budget > corrupted_set.size()
               ? cfg.budget - static_cast<std::uint32_t>(corrupted_set.size())
               : 0;
  }
  bool corrupt(PartyId p) override { return do_corrupt(p, "adaptive"); }
  void send_as(PartyId src, PartyId dst, const ProtocolMessage& m) override {
    if (!is_corrupted(src)) throw CapabilityError("send_as for uncorrupted party");
    submit(src, dst, m);
  }
  void request_leader_as(PartyId p, Slot slot, std::uint64_t k) override {
    if (!is_corrupted(p)) throw CapabilityError("oracle request for uncorrupted party");
    do_request_leader(p, slot, k);
  }
  void request_coin_as(PartyId p, Slot slot, std::uint64_t index, std::uint64_t round) override {
    if (!is_corrupted(p)) throw CapabilityError("oracle request for uncorrupted party");
    do_request_coin(p, slot, index, round);
  }
  crypto::AdversarySigner& signer() override { return adv_signer; }
  crypto::PartySigner party_signer_for_corrupted(PartyId p) override {
    if (!is_corrupted(p)) throw CapabilityError("signing capability not transferred");
    return sig_ledger.signer_for(p);
  }
  const crypto::Ledger& ledger() const override { return sig_ledger; }
  void wake_at(Time t) override {
    if (t <= now_) throw std::logic_error("adversary wake must be in the future");
    if (adv_wakes_registered.insert(t).second) {
      queue.insert(Ev{t, kPhaseAdvWake, 0, ev_seq++, EvKind::AdvWake});
    }
  }

  // ---- internals ----
  void submit(PartyId src, PartyId dst, const ProtocolMessage& m) {
    if (dst == 0 || dst > cfg.params.n) throw ConfigError("send to unknown party");
    Envelope e;
    e.id = envelopes.size();
    e.src = src;
    e.dst = dst;
    e.payload = m.encode();
    e.send_time = now_;
    envelopes.push_back(std::move(e));
    pending.push_back(envelopes.back().id);
  }

  void register_wake(PartyId p, Time t) {
    if (t <= now_) throw std::logic_error("wake must be in the future");
    if (wakes_registered.insert({p, t}).second) {
      queue.insert(Ev{t, kPhaseWake, p, ev_seq++, EvKind::Wake, 0, p});
    }
  }

  bool do_corrupt(PartyId p, const std::string& why) {
    if (p == 0 || p > cfg.params.n) return false;
    if (corrupted_set.count(p)) return false;
    if (corrupted_set.size() >= cfg.budget) {
      tw.add(now_, RecordKind::Note, 0, 0, {},
             "corrupt-rejected party=" + std::to_string(p) + " reason=budget");
      return false;
    }
    corrupted_set.insert(p);
    sig_ledger.mark_corrupted(p);
    tw.add(now_, RecordKind::Corrupt, p, 0, {}, "by=" + why);
    return true;
  }

  void do_request_leader(PartyId p, Slot slot, std::uint64_t k) {
    const auto inst = leader_instance_id(slot, k);
    tw.add(now_, RecordKind::Oracle, p, 0, {},
           "leader-req slot=" + std::to_string(slot) + " k=" + std::to_string(k));
    auto rev = leader_oracle.request(inst, p);
    if (!rev) return;
    tw.add(now_, RecordKind::Oracle, 0, 0, {},
           "leader-reveal slot=" + std::to_string(slot) + " k=" + std::to_string(k) +
               " leader=" + std::to_string(rev->leader));
    OracleReveal orv;
    orv.is_leader = true;
    orv.slot = slot;
    orv.k_or_index = k;
    orv.value = rev->leader;
    strategy->on_oracle_reveal(orv, *this);
    for (PartyId q = 1; q <= cfg.params.n; ++q) {
      queue.insert(
          Ev{now_, kPhaseOracle, q, ev_seq++, EvKind::OracleLeader, 0, q, {}, slot, k, 0,
             rev->leader});
    }
  }

  void do_request_coin(PartyId p, Slot slot, std::uint64_t index, std::uint64_t round) {
    const crypto::CoinOracle::Key key{coin_instance_id(slot, index), round};
    tw.add(now_, RecordKind::Oracle, p, 0, {},
           "coin-req slot=" + std::to_string(slot) + " i=" + std::to_string(index) +
               " r=" + std::to_string(round));
    auto rev = coin_oracle.request(key, p);
    if (!rev) return;
    tw.add(now_, RecordKind::Oracle, 0, 0, {},
           "coin-reveal slot=" + std::to_string(slot) + " i=" + std::to_string(index) +
               " r=" + std::to_string(round) + " c=" + std::to_string(rev->value ? 1 : 0));
    OracleReveal orv;
    orv.is_leader = false;
    orv.slot = slot;
    orv.k_or_index = index;
    orv.round = round;
    orv.value = rev->value ? 1 : 0;
    strategy->on_oracle_reveal(orv, *this);
    for (PartyId q = 1; q <= cfg.params.n; ++q) {
      queue.insert(Ev{now_, kPhaseOracle, q, ev_seq++, EvKind::OracleCoin, 0, q, {}, slot, index,
                      round, rev->value ? 1u : 0u});
    }
  }

  void schedule_envelope(std::size_t idx) {
    Envelope& e = envelopes[idx];
    ScheduleDecision d = strategy->schedule(e, *this);
    const Time min_t = e.send_time + 1;
    const Time max_t =
        (cfg.net.mode == NetConfig::Mode::Sync) ? e.send_time + cfg.net.delta : cfg.net.horizon;
    Time chosen = std::clamp(d.deliver_time, min_t, max_t);
    e.clamped = (chosen != d.deliver_time);
    e.deliver_time = chosen;
    e.priority = d.priority;
    std::string note = "env=" + std::to_string(e.id) + " sched=" + std::to_string(e.deliver_time);
    if (e.clamped) note += " clamped=1";
    tw.add(e.send_time, RecordKind::Send, e.src, e.dst, e.payload, note);
    queue.insert(
        Ev{e.deliver_time, kPhaseDeliver, e.priority, ev_seq++, EvKind::Deliver, e.id, e.dst});
  }

  void dispatch(const Ev& ev) {
    switch (ev.kind) {
      case EvKind::ScheduledCorrupt:
        do_corrupt(ev.party, "schedule");
        break;
      case EvKind::Deliver: {
        const Envelope& e = envelopes[ev.env_index];
        tw.add(now_, RecordKind::Deliver, e.src, e.dst, {}, "env=" + std::to_string(e.id));
        if (is_corrupted(e.dst)) {
          strategy->on_deliver_to_corrupted(e, *this);
        } else {
          auto msg = decode_message(e.payload);
          if (!msg) {
            tw.add(now_, RecordKind::Note, e.dst, 0, {},
                   "malformed-drop env=" + std::to_string(e.id));
          } else {
            parties[e.dst]->on_message(e.src, *msg, *fx[e.dst]);
          }
        }
        break;
      }
      case EvKind::Tx:
        if (is_corrupted(ev.party)) {
          strategy->on_tx_to_corrupted(ev.party, ev.tx_payload, *this);
        } else {
          parties[ev.party]->on_transaction(ev.tx_payload, *fx[ev.party]);
        }
        break;
      case EvKind::Start:
        if (!is_corrupted(ev.party)) parties[ev.party]->start(*fx[ev.party]);
        break;
      case EvKind::Wake:
        if (!is_corrupted(ev.party)) parties[ev.party]->on_wake(now_, *fx[ev.party]);
        break;
      case EvKind::OracleLeader:
        if (!is_corrupted(ev.party)) {
          parties[ev.party]->on_leader(ev.slot, ev.a, static_cast<PartyId>(ev.value),
                                       *fx[ev.party]);
        }
        break;
      case EvKind::OracleCoin:
        if (!is_corrupted(ev.party)) {
          parties[ev.party]->on_coin(ev.slot, ev.a, ev.b, ev.value != 0, *fx[ev.party]);
        }
        break;
      case EvKind::AdvWake:
        strategy->on_wake(now_, *this);
        break;
    }
  }

  void epilogue(Time t) {
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const Envelope& e = envelopes[pending[i]];
      if (!is_corrupted(e.src)) strategy->on_honest_send(e, *this);
    }
    strategy->on_phase(t, *this);
    std::vector<std::size_t> batch;
    batch.swap(pending);
    for (std::size_t idx : batch) schedule_envelope(idx);
  }

  bool has_events_at(Time t) const { return !queue.empty() && queue.begin()->t == t; }

  std::string run() {
    cfg.validate();
    tw.config_line(cfg.canonical_text());

    const auto n = cfg.params.n;
    parties.resize(n + 1);
    fx.resize(n + 1);
    for (PartyId p = 1; p <= n; ++p) {
      PartyEnv env;
      env.params = cfg.params;
      env.session = cfg.session;
      env.sync_mode = (cfg.net.mode == NetConfig::Mode::Sync);
      env.delta = cfg.net.delta;
      env.self = p;
      env.signer = sig_ledger.signer_for(p);
      env.ledger = &sig_ledger;
      env.scenario = &cfg;
      parties[p] = factory(env);
      fx[p] = std::make_unique<PartyFx>(this, p);
      queue.insert(Ev{0, kPhaseWake, p, ev_seq++, EvKind::Start, 0, p});
    }
    for (const auto& ce : cfg.corrupt_at) {
      queue.insert(
          Ev{ce.time, kPhaseCorrupt, ce.party, ev_seq++, EvKind::ScheduledCorrupt, 0, ce.party});
    }
    std::uint64_t tx_order = 0;
    for (const auto& tx : cfg.txs) {
      std::vector<PartyId> targets = tx.targets;
      if (targets.empty()) {
        for (PartyId p = 1; p <= n; ++p) targets.push_back(p);
      }
      for (PartyId p : targets) {
        Ev ev{tx.time, kPhaseDeliver, tx_order++, ev_seq++, EvKind::Tx, 0, p};
        ev.tx_payload = tx.payload;
        queue.insert(std::move(ev));
      }
    }

    strategy->on_start(*this);
    // Submissions made during on_start are scheduled in the first epilogue.

    while (!queue.empty()) {
      Time t = queue.begin()->t;
      if (t >= cfg.net.horizon) break;
      now_ = t;
      int guard = 0;
      for (;;) {
        bool did_anything = false;
        while (has_events_at(t)) {
          Ev ev = *queue.begin();
          queue.erase(queue.begin());
          dispatch(ev);
          did_anything = true;
        }
        if (!did_anything && pending.empty()) break;
        epilogue(t);
        if (!has_events_at(t)) break;
        if (++guard > 100000) throw std::logic_error("event loop did not settle at one timestamp");
      }
    }

    now_ = cfg.net.horizon;
    for (PartyId p = 1; p <= n; ++p) {
      std::string s = is_corrupted(p) ? std::string("corrupted") : parties[p]->summary_note();
      if (!s.empty()) tw.add(now_, RecordKind::Note, p, 0, {}, s);
    }
    for (PartyId p = 1; p <= n; ++p) {
      Digest d = is_corrupted(p) ? sha256(to_bytes("corrupted")) : parties[p]->state_digest();
      tw.add(now_, RecordKind::Digest, p, 0, d.to_bytes(), "final-state");
    }
    return tw.text();
  }
};

Simulation::Simulation(const ScenarioConfig& cfg, PartyFactory factory,
                       std::unique_ptr<Strategy> strategy)
    : impl_(std::make_unique<Impl>(cfg, std::move(factory), std::move(strategy))) {}

Simulation::~Simulation() = default;

std::string Simulation::run() {
  return impl_->run();
}

}  // namespace nasmr
