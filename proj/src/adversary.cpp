#include "nasmr/adversary.hpp"

#include <algorithm>
#include <deque>

#include "nasmr/smr.hpp"
#include "nasmr/validity.hpp"

namespace nasmr {

namespace {

// Lehmer-code rank: position of element `id` in the perm_index-th permutation
// of [0..k).
std::uint64_t perm_rank(std::uint64_t id, std::uint64_t k, std::uint64_t index) {
  std::vector<std::uint64_t> items;
  for (std::uint64_t i = 0; i < k; ++i) items.push_back(i);
  std::vector<std::uint64_t> order;
  std::uint64_t fact = 1;
  for (std::uint64_t i = 2; i < k; ++i) fact *= i;  // (k-1)!
  std::uint64_t rem = index;
  for (std::uint64_t left = k; left > 0; --left) {
    std::uint64_t pick = (fact == 0) ? 0 : (rem / fact) % left;
    order.push_back(items[pick]);
    items.erase(items.begin() + static_cast<std::ptrdiff_t>(pick));
    if (left > 1) {
      rem %= fact * left;
      fact /= (left - 1) ? (left - 1) : 1;
    }
  }
  for (std::uint64_t pos = 0; pos < order.size(); ++pos) {
    if (order[pos] == id) return pos;
  }
  return 0;
}

class ParamSchedStrategy : public Strategy {
 public:
  ScheduleDecision schedule(const Envelope& e, AdvCtx& a) override {
    const ScenarioConfig& sc = a.scenario();
    const std::int64_t perm_k = sc.strategy_param("perm_k", 0);
    if (perm_k > 0 && e.id < static_cast<std::uint64_t>(perm_k)) {
      const auto idx = static_cast<std::uint64_t>(sc.strategy_param("perm_index", 0));
      return {e.send_time + 1 +
                  static_cast<Time>(perm_rank(e.id, static_cast<std::uint64_t>(perm_k), idx)),
              0};
    }
    const std::int64_t maxd = sc.strategy_param("max_delay", 0);
    if (sc.strategy_param("random_sched", 0) != 0) {
      const std::uint64_t hi = static_cast<std::uint64_t>(std::max<std::int64_t>(1, maxd ? maxd : 8));
      return {e.send_time + static_cast<Time>(a.rng().range(1, hi)),
              a.rng().uniform(1 << 16)};
    }
    if (maxd > 0) return {e.send_time + maxd, 0};
    return {e.send_time + 1, 0};
  }
};

class BenignStrategy final : public ParamSchedStrategy {
 public:
  std::string name() const override { return "benign"; }
};

// Corrupted parties stay silent; the corruption schedule does the work.
class CrashStrategy final : public ParamSchedStrategy {
 public:
  explicit CrashStrategy(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return name_; }

 private:
  std::string name_;
};

class MaxDelayStrategy final : public ParamSchedStrategy {
 public:
  std::string name() const override { return "async-max-delay"; }
  ScheduleDecision schedule(const Envelope& e, AdvCtx& a) override {
    const std::int64_t maxd = a.scenario().strategy_param("max_delay", 8);
    return {e.send_time + maxd, 0};
  }
};

class RandomizedStrategy final : public ParamSchedStrategy {
 public:
  std::string name() const override { return "randomized"; }
  ScheduleDecision schedule(const Envelope& e, AdvCtx& a) override {
    const std::uint64_t hi =
        static_cast<std::uint64_t>(std::max<std::int64_t>(1, a.scenario().strategy_param("max_delay", 8)));
    return {e.send_time + static_cast<Time>(a.rng().range(1, hi)), a.rng().uniform(1 << 16)};
  }
};

std::vector<PartyId> honest_parties(AdvCtx& a) {
  std::vector<PartyId> out;
  for (PartyId p = 1; p <= a.scenario().params.n; ++p) {
    if (!a.is_corrupted(p)) out.push_back(p);
  }
  return out;
}

ProtocolMessage with_ctx(Slot slot, std::uint64_t inst, std::uint64_t round, MsgBody body) {
  ProtocolMessage m;
  m.ctx = MsgContext{slot, inst, round};
  m.body = std::move(body);
  return m;
}

// The designated RBC sender splits its value between two halves of the
// parties, and mirrors the split on echo/ready traffic.
class RbcEquivocator final : public ParamSchedStrategy {
 public:
  std::string name() const override { return "rbc-equivocator"; }

  void on_phase(Time t, AdvCtx& a) override {
    if (t != 0 || fired_) return;
    fired_ = true;
    const ScenarioConfig& sc = a.scenario();
    const PartyId sender = sc.rbc_sender;
    if (!a.is_corrupted(sender)) return;  // nothing to equivocate
    Bytes v;
    auto it = sc.inputs.find(sender);
    v = it != sc.inputs.end() ? it->second : to_bytes("tx-p" + std::to_string(sender));
    Bytes v2 = sha256(v).to_bytes();

    const bool values_only = sc.strategy_param("values_only", 0) != 0;
    auto honest = honest_parties(a);
    const std::size_t half = (honest.size() + 1) / 2;
    for (std::size_t i = 0; i < honest.size(); ++i) {
      const Bytes& val = (i < half) ? v : v2;
      a.send_as(sender, honest[i], with_ctx(1, sender, 0, RbcValueMsg{val}));
      if (values_only) continue;
      a.send_as(sender, honest[i], with_ctx(1, sender, 0, RbcEchoMsg{val}));
      a.send_as(sender, honest[i], with_ctx(1, sender, 0, RbcReadyMsg{i < half ? v2 : v}));
    }
  }

 private:
  bool fired_ = false;
};

// Corrupted non-senders flood conflicting echo/ready messages.
class RbcByzantine final : public ParamSchedStrategy {
 public:
  std::string name() const override { return "rbc-byzantine"; }

  void on_phase(Time t, AdvCtx& a) override {
    if (t != 0 || fired_) return;
    fired_ = true;
    const ScenarioConfig& sc = a.scenario();
    const PartyId sender = sc.rbc_sender;
    Bytes v;
    auto it = sc.inputs.find(sender);
    v = it != sc.inputs.end() ? it->second : to_bytes("tx-p" + std::to_string(sender));
    Bytes v2 = sha256(v).to_bytes();

    auto honest = honest_parties(a);
    for (PartyId c = 1; c <= sc.params.n; ++c) {
      if (!a.is_corrupted(c)) continue;
      for (std::size_t i = 0; i < honest.size(); ++i) {
        const bool flip = (i % 2 == 0);
        a.send_as(c, honest[i], with_ctx(1, sender, 0, RbcEchoMsg{flip ? v2 : v}));
        a.send_as(c, honest[i], with_ctx(1, sender, 0, RbcReadyMsg{flip ? v : v2}));
      }
    }
  }

 private:
  bool fired_ = false;
};

// Corrupted party equivocating its own ACS reliable broadcast (value split).
class AcsEquivocator final : public ParamSchedStrategy {
 public:
  std::string name() const override { return "acs-equivocator"; }

  void on_phase(Time t, AdvCtx& a) override {
    if (t != 0 || fired_) return;
    fired_ = true;
    const ScenarioConfig& sc = a.scenario();
    for (PartyId c = 1; c <= sc.params.n; ++c) {
      if (!a.is_corrupted(c)) continue;
      Bytes va = Block::single(to_bytes("equiv-a-" + std::to_string(c))).encode_body();
      Bytes vb = Block::single(to_bytes("equiv-b-" + std::to_string(c))).encode_body();
      auto honest = honest_parties(a);
      const std::size_t half = (honest.size() + 1) / 2;
      for (std::size_t i = 0; i < honest.size(); ++i) {
        a.send_as(c, honest[i], with_ctx(1, c, 0, RbcValueMsg{i < half ? va : vb}));
      }
    }
  }

 private:
  bool fired_ = false;
};

// Corrupted proposer in a standalone GC run: collects Status messages and
// sends two different correctly formed Propose messages to two halves.
class ProposeEquivocator final : public ParamSchedStrategy {
 public:
  std::string name() const override { return "propose-equivocator"; }

  void on_start(AdvCtx& a) override {
    // Proposer step of the standalone GC preamble runs at 2*delta.
    a.wake_at(2 * a.scenario().net.delta);
  }

  void on_deliver_to_corrupted(const Envelope& e, AdvCtx& a) override {
    auto m = decode_message(e.payload);
    if (!m) return;
    if (const auto* status = std::get_if<StatusMsg>(&m->body)) {
      if (m->ctx.inst != e.dst) return;  // not for our Propose instance
      const crypto::Verifier v{&a.ledger(), a.scenario().session, 1};
      if (status_correctly_formed(*status, a.scenario().params.n, v)) {
        statuses_.emplace(status->signer, *status);
        proposer_ = e.dst;
      }
    }
  }

  void on_wake(Time, AdvCtx& a) override {
    if (fired_ || proposer_ == 0) return;
    fired_ = true;
    const ScenarioConfig& sc = a.scenario();
    const std::uint32_t n = sc.params.n;
    const std::uint32_t quorum = sc.params.majority();

    // Add the proposer's own status (a self-signed 0-vote) so two distinct
    // quorum-sized subsets exist.
    auto own_signer = a.party_signer_for_corrupted(proposer_);
    SignedBuffer sb;
    sb.signer = proposer_;
    sb.buffer = Block::single(to_bytes("equiv-pair"));
    sb.sig = own_signer.sign(buffer_tag(sc.session, 1), sb.buffer.encode_body());
    Pair own_pair(sb.buffer, {sb});
    StatusMsg own;
    own.signer = proposer_;
    own.vote = Vote{0, own_pair, Certificate{}};
    own.sig = own_signer.sign(status_tag(sc.session, 1), status_sign_payload(own.vote));
    statuses_.emplace(proposer_, own);

    if (statuses_.size() < quorum + 1) return;  // cannot build two variants

    std::vector<StatusMsg> all;
    for (const auto& [p, s] : statuses_) all.push_back(s);
    std::vector<StatusMsg> first(all.begin(), all.begin() + quorum);
    std::vector<StatusMsg> second(all.end() - quorum, all.end());

    auto make_propose = [&](std::vector<StatusMsg> sts) {
      ProposeMsg pm;
      pm.proposer = proposer_;
      pm.statuses = std::move(sts);
      pm.sig = own_signer.sign(propose_tag(sc.session, 1, 1, proposer_),
                               propose_sign_payload(pm.statuses));
      return with_ctx(1, proposer_, 1, std::move(pm));
    };
    ProtocolMessage m1 = make_propose(first);
    ProtocolMessage m2 = make_propose(second);

    auto honest = honest_parties(a);
    const std::size_t half = (honest.size() + 1) / 2;
    for (std::size_t i = 0; i < honest.size(); ++i) {
      a.send_as(proposer_, honest[i], (i < half) ? m1 : m2);
    }
  }

 private:
  std::map<PartyId, StatusMsg> statuses_;
  PartyId proposer_ = 0;
  bool fired_ = false;
};

// Adaptively corrupts each revealed leader; corrupted leaders stay silent,
// suppressing their Commit for the iteration.
class LeaderAssassin final : public ParamSchedStrategy {
 public:
  std::string name() const override { return "leader-assassin"; }

  void on_oracle_reveal(const OracleReveal& r, AdvCtx& a) override {
    if (!r.is_leader) return;
    const auto leader = static_cast<PartyId>(r.value);
    if (!a.is_corrupted(leader) && a.budget_left() > 0) a.corrupt(leader);
  }
};

// SMR equivocator: corrupted parties send different signed buffers to the two
// halves at each slot start, and equivocate the ACS broadcast of their slot
// value.
class SmrEquivocator final : public ParamSchedStrategy {
 public:
  std::string name() const override { return "equivocator"; }

  void on_start(AdvCtx& a) override {
    const ScenarioConfig& sc = a.scenario();
    for (Slot k = 1; k <= sc.slots; ++k) {
      const Time t0 = sc.slot_period() * static_cast<Time>(k - 1);
      if (t0 > 0 && t0 < sc.net.horizon) a.wake_at(t0);
      const Time t1 = t0 + sc.net.delta;
      if (t1 < sc.net.horizon) a.wake_at(t1);
    }
  }

  void on_tx_to_corrupted(PartyId, const Bytes& payload, AdvCtx&) override {
    txs_.insert(Transaction::make(payload));
  }

  void on_phase(Time t, AdvCtx& a) override {
    if (t == 0) act(0, a);
  }
  void on_wake(Time t, AdvCtx& a) override { act(t, a); }

 private:
  void act(Time t, AdvCtx& a) {
    const ScenarioConfig& sc = a.scenario();
    for (Slot k = 1; k <= sc.slots; ++k) {
      const Time t0 = sc.slot_period() * static_cast<Time>(k - 1);
      if (t == t0 && buffers_sent_.insert(k).second) send_buffers(k, a);
      if (t == t0 + sc.net.delta && values_sent_.insert(k).second) send_values(k, a);
    }
  }

  void send_buffers(Slot k, AdvCtx& a) {
    const ScenarioConfig& sc = a.scenario();
    for (PartyId c = 1; c <= sc.params.n; ++c) {
      if (!a.is_corrupted(c)) continue;
      Block base = txs_;
      Block fat = base;
      fat.insert(Transaction::make(to_bytes("fake-" + std::to_string(k))));
      auto signer = a.party_signer_for_corrupted(c);
      auto mk = [&](const Block& b) {
        SignedBuffer sb;
        sb.signer = c;
        sb.buffer = b;
        sb.sig = signer.sign(buffer_tag(sc.session, k), b.encode_body());
        return with_ctx(k, 0, 0, BufferMsg{std::move(sb)});
      };
      ProtocolMessage ma = mk(base);
      ProtocolMessage mb = mk(fat);
      for (PartyId q = 1; q <= sc.params.n; ++q) {
        if (a.is_corrupted(q)) continue;
        a.send_as(c, q, (q % 2 == 0) ? ma : mb);
      }
    }
  }

  void send_values(Slot k, AdvCtx& a) {
    const ScenarioConfig& sc = a.scenario();
    for (PartyId c = 1; c <= sc.params.n; ++c) {
      if (!a.is_corrupted(c)) continue;
      Bytes va = Block::single(to_bytes("equiv-a-" + std::to_string(k))).encode_body();
      Bytes vb = Block::single(to_bytes("equiv-b-" + std::to_string(k))).encode_body();
      for (PartyId q = 1; q <= sc.params.n; ++q) {
        if (a.is_corrupted(q)) continue;
        a.send_as(c, q, with_ctx(k, c, 0, RbcValueMsg{(q % 2 == 0) ? va : vb}));
      }
    }
  }

  Block txs_;
  std::set<Slot> buffers_sent_;
  std::set<Slot> values_sent_;
};

// ---- split-world (threshold-violation experiment) ----

// Each corrupted party in Sa is duplicated: copy b runs the honest SMR logic
// against camp S_b only. Cross-camp honest traffic is scheduled at the
// horizon (never processed).
class SplitWorld final : public ParamSchedStrategy {
 public:
  std::string name() const override { return "split-world"; }

  ScheduleDecision schedule(const Envelope& e, AdvCtx& a) override {
    const auto& pr = a.scenario().params;
    const int ss = split_world_side(pr, e.src);
    const int ds = split_world_side(pr, e.dst);
    if (ss >= 0 && ds >= 0 && ss != ds) {
      return {a.scenario().net.horizon, 0};  // blocked past the experiment
    }
    return {e.send_time + 1, 0};
  }

  void on_start(AdvCtx& a) override {
    const ScenarioConfig& sc = a.scenario();
    const auto& pr = sc.params;
    for (PartyId p = static_cast<PartyId>(2 * pr.t_s + 1); p <= pr.n; ++p) {
      if (a.budget_left() == 0) break;
      a.corrupt(p);
    }
    for (PartyId p = 1; p <= pr.n; ++p) {
      if (!a.is_corrupted(p)) continue;
      for (int side = 0; side < 2; ++side) {
        smr::Config cfg;
        cfg.params = pr;
        cfg.self = p;
        cfg.session = sc.session;
        cfg.delta = sc.net.delta;
        cfg.start_time = 0;
        cfg.slot_limit = sc.slots;
        cfg.signer = a.party_signer_for_corrupted(p);
        cfg.ledger = &a.ledger();
        copies_.push_back(std::make_unique<Copy>(p, side, std::move(cfg)));
        copies_.back()->core.on_transaction(lower_bound_payload(sc.net.seed, side));
      }
    }
    for (auto& c : copies_) {
      for (Time t : c->core.wake_times()) {
        if (t == 0) {
          smr::Out out;
          c->core.on_wake(0, out);
          route(*c, out, a);
        } else {
          wakes_[t].push_back(c.get());
          if (t < a.scenario().net.horizon) a.wake_at(t);
        }
      }
    }
  }

  void on_wake(Time t, AdvCtx& a) override {
    deliver_internal(t, a);
    auto it = wakes_.find(t);
    if (it == wakes_.end()) return;
    for (Copy* c : it->second) {
      smr::Out out;
      c->core.on_wake(t, out);
      route(*c, out, a);
    }
  }

  void on_phase(Time t, AdvCtx& a) override { deliver_internal(t, a); }

  void on_deliver_to_corrupted(const Envelope& e, AdvCtx& a) override {
    auto msg = decode_message(e.payload);
    if (!msg) return;
    const int side = split_world_side(a.scenario().params, e.src);
    if (side < 0) return;  // copies exchange internally, not over the wire
    for (auto& c : copies_) {
      if (c->party == e.dst && c->side == side) {
        smr::Out out;
        c->core.on_message(e.src, *msg, out);
        route(*c, out, a);
      }
    }
  }

  void on_oracle_reveal(const OracleReveal& r, AdvCtx& a) override {
    // Reveals are public; both copies of every corrupted party observe them.
    pending_oracle_.push_back(r);
    if (a.now() + 1 < a.scenario().net.horizon) a.wake_at(a.now() + 1);
  }

 private:
  struct Copy {
    PartyId party;
    int side;
    smr::Core core;
    Copy(PartyId p, int s, smr::Config cfg) : party(p), side(s), core(std::move(cfg)) {}
  };

  struct InternalMsg {
    Time due;
    Copy* dst;
    PartyId from;
    ProtocolMessage msg;
  };

  void route(Copy& c, smr::Out& out, AdvCtx& a) {
    const auto& pr = a.scenario().params;
    auto deliver_to = [&](PartyId dst, const ProtocolMessage& m) {
      const int ds = split_world_side(pr, dst);
      if (ds == c.side) {
        if (!a.is_corrupted(dst)) a.send_as(c.party, dst, m);
      } else if (ds < 0 && a.is_corrupted(dst)) {
        for (auto& other : copies_) {
          if (other->party == dst && other->side == c.side) {
            internal_.push_back({a.now() + 1, other.get(), c.party, m});
            if (a.now() + 1 < a.scenario().net.horizon) a.wake_at(a.now() + 1);
          }
        }
      }
    };
    for (const auto& [dst, m] : out.sends) deliver_to(dst, m);
    for (const auto& m : out.broadcasts) {
      for (PartyId q = 1; q <= pr.n; ++q) deliver_to(q, m);
    }
    for (const auto& r : out.leader_reqs) a.request_leader_as(c.party, r.slot, r.k);
    for (const auto& r : out.coin_reqs) a.request_coin_as(c.party, r.slot, r.index, r.round);
  }

  void deliver_internal(Time t, AdvCtx& a) {
    // Oracle reveals first, then copy-to-copy messages that are due.
    std::vector<OracleReveal> reveals;
    reveals.swap(pending_oracle_);
    for (const auto& r : reveals) {
      for (auto& c : copies_) {
        smr::Out out;
        if (r.is_leader) {
          c->core.on_leader(r.slot, r.k_or_index, static_cast<PartyId>(r.value), out);
        } else {
          c->core.on_coin(r.slot, r.k_or_index, r.round, r.value != 0, out);
        }
        route(*c, out, a);
      }
    }
    std::vector<InternalMsg> due;
    auto it = internal_.begin();
    while (it != internal_.end()) {
      if (it->due <= t) {
        due.push_back(std::move(*it));
        it = internal_.erase(it);
      } else {
        ++it;
      }
    }
    for (auto& im : due) {
      smr::Out out;
      im.dst->core.on_message(im.from, im.msg, out);
      route(*im.dst, out, a);
    }
  }

  std::vector<std::unique_ptr<Copy>> copies_;
  std::map<Time, std::vector<Copy*>> wakes_;
  std::deque<InternalMsg> internal_;
  std::vector<OracleReveal> pending_oracle_;
};

}  // namespace

int split_world_side(const ProtocolParams& params, PartyId p) {
  if (p <= params.t_s) return 0;
  if (p <= 2 * params.t_s) return 1;
  return -1;
}

Bytes lower_bound_payload(std::uint64_t seed, int side) {
  Rng rng(seed, side == 0 ? "lower-bound-m0" : "lower-bound-m1");
  Bytes out(32);
  rng.fill(out.data(), out.size());
  return out;
}

std::unique_ptr<Strategy> make_strategy(const std::string& name) {
  if (name == "benign") return std::make_unique<BenignStrategy>();
  if (name == "crash" || name == "abort" || name == "status-withholder") {
    return std::make_unique<CrashStrategy>(name);
  }
  if (name == "async-max-delay") return std::make_unique<MaxDelayStrategy>();
  if (name == "randomized") return std::make_unique<RandomizedStrategy>();
  if (name == "rbc-equivocator") return std::make_unique<RbcEquivocator>();
  if (name == "rbc-byzantine") return std::make_unique<RbcByzantine>();
  if (name == "acs-equivocator") return std::make_unique<AcsEquivocator>();
  if (name == "propose-equivocator") return std::make_unique<ProposeEquivocator>();
  if (name == "leader-assassin") return std::make_unique<LeaderAssassin>();
  if (name == "equivocator") return std::make_unique<SmrEquivocator>();
  if (name == "split-world") return std::make_unique<SplitWorld>();
  return nullptr;
}

std::vector<std::string> strategy_names() {
  return {"benign",          "crash",           "abort",
          "status-withholder", "async-max-delay", "randomized",
          "rbc-equivocator", "rbc-byzantine",   "acs-equivocator",
          "propose-equivocator", "leader-assassin", "equivocator",
          "split-world"};
}

bool strategy_known(const std::string& name) {
  return make_strategy(name) != nullptr;
}

}  // namespace nasmr
