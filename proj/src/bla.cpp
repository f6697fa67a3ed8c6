#include "nasmr/bla.hpp"

#include <algorithm>

namespace nasmr::bla {

namespace {

ProtocolMessage ctx_msg(Slot slot, std::uint64_t inst, std::uint64_t k, MsgBody body) {
  ProtocolMessage m;
  m.ctx = MsgContext{slot, inst, k};
  m.body = std::move(body);
  return m;
}

void finalize_propose(const GcConfig& cfg, ProposeState& ps) {
  ps.closed = true;
  if (ps.output_set) return;
  if (!ps.from_proposer.has_value()) {
    // Already bottom from the 2d step; kept for robustness.
    ps.output_set = true;
    return;
  }
  for (const auto& [relayer, encoded] : ps.relays) {
    if (encoded != ps.from_proposer_enc) {
      ps.output_set = true;  // conflicting Propose seen: bottom
      return;
    }
  }
  // status_max: maximal k', ties by lowest signer index. The statuses were
  // validated when the Propose message was accepted.
  const StatusMsg* best = nullptr;
  std::set<PartyId> seen;
  for (const auto& s : ps.from_proposer->statuses) {
    if (!seen.insert(s.signer).second) continue;
    if (best == nullptr || s.vote.k > best->vote.k ||
        (s.vote.k == best->vote.k && s.signer < best->signer)) {
      best = &s;
    }
  }
  ps.output_set = true;
  if (best != nullptr) ps.output = best->vote.pair;
}

}  // namespace

GcOut gc_start(const GcConfig& cfg, GcState& st, Vote input) {
  GcOut out;
  st.input = std::move(input);
  st.props.assign(cfg.params.n + 1, ProposeState{});
  StatusMsg status;
  status.signer = cfg.self;
  status.vote = st.input;
  status.sig = cfg.signer.sign(status_tag(cfg.session, cfg.slot), status_sign_payload(st.input));
  for (PartyId j = 1; j <= cfg.params.n; ++j) {
    out.sends.emplace_back(j, ctx_msg(cfg.slot, j, cfg.k, status));
  }
  return out;
}

GcOut gc_step(const GcConfig& cfg, GcState& st, int step) {
  GcOut out;
  if (st.terminated) return out;
  const std::uint32_t n = cfg.params.n;
  const std::uint32_t quorum = cfg.params.majority();

  switch (step) {
    case 1: {  // proposer step: bundle >= quorum correctly formed statuses
      ProposeState& ps = st.props[cfg.self];
      if (ps.statuses.size() >= quorum && !ps.proposer_sent) {
        ps.proposer_sent = true;
        ProposeMsg prop;
        prop.proposer = cfg.self;
        for (const auto& [signer, s] : ps.statuses) prop.statuses.push_back(s);
        prop.sig = cfg.signer.sign(propose_tag(cfg.session, cfg.slot, cfg.k, cfg.self),
                                   propose_sign_payload(prop.statuses));
        out.broadcasts.push_back(ctx_msg(cfg.slot, cfg.self, cfg.k, std::move(prop)));
      }
      break;
    }
    case 2: {  // relay or bottom
      for (PartyId j = 1; j <= n; ++j) {
        ProposeState& ps = st.props[j];
        if (ps.from_proposer.has_value()) {
          if (!ps.relayed) {
            ps.relayed = true;
            out.broadcasts.push_back(ctx_msg(cfg.slot, j, cfg.k, *ps.from_proposer));
          }
        } else if (!ps.output_set) {
          ps.output_set = true;  // bottom
        }
      }
      break;
    }
    case 3: {  // finalize Propose outputs, then ask for the leader
      for (PartyId j = 1; j <= n; ++j) finalize_propose(cfg, st.props[j]);
      if (!st.leader_requested) {
        st.leader_requested = true;
        out.request_leader = true;
      }
      break;
    }
    case 4: {  // certificate formation
      if (!st.leader.has_value()) st.anomaly_no_leader = true;
      for (const auto& [digest, signers] : st.commits) {
        if (signers.size() < quorum) continue;
        const Pair& pair = st.commit_pairs.at(digest);
        Certificate cert;
        for (const auto& [signer, cm] : signers) {
          cert.add(CertEntry{signer, cm.k, cm.sig});
        }
        NotifyMsg notify{cfg.k, pair, cert};
        out.broadcasts.push_back(ctx_msg(cfg.slot, 0, cfg.k, notify));
        st.output = GcOutput{pair, std::move(cert), 2};
        st.terminated = true;
        out.output_now = true;
        break;
      }
      break;
    }
    case 5: {  // Notify adoption or grade 0
      if (st.notifies.empty()) {
        st.output = GcOutput{std::nullopt, Certificate{}, 0};
      } else {
        const auto& [sender, m] = *st.notifies.begin();  // lowest sender index
        st.output = GcOutput{m.pair, m.cert, 1};
      }
      st.terminated = true;
      out.output_now = true;
      break;
    }
    default:
      break;
  }
  return out;
}

GcOut gc_handle(const GcConfig& cfg, GcState& st, PartyId from, const ProtocolMessage& m) {
  GcOut out;
  if (st.terminated) return out;
  const crypto::Verifier v = cfg.verifier();
  const std::uint32_t n = cfg.params.n;

  if (const auto* status = std::get_if<StatusMsg>(&m.body)) {
    // Addressed per Propose instance; only the proposer collects them.
    if (m.ctx.inst != cfg.self) return out;
    ProposeState& ps = st.props[cfg.self];
    if (ps.proposer_sent || ps.statuses.count(status->signer)) return out;
    if (status_correctly_formed(*status, n, v)) ps.statuses.emplace(status->signer, *status);
    return out;
  }

  if (const auto* prop = std::get_if<ProposeMsg>(&m.body)) {
    const std::uint64_t j = m.ctx.inst;
    if (j == 0 || j > n) return out;
    ProposeState& ps = st.props[j];
    if (ps.closed) return out;
    Bytes encoded = ctx_msg(cfg.slot, j, cfg.k, *prop).encode_body();
    const Digest d = sha256(encoded);
    auto cached = st.propose_cache.find(d);
    bool ok;
    if (cached != st.propose_cache.end()) {
      ok = cached->second;
    } else {
      ok = propose_correctly_formed(*prop, static_cast<PartyId>(j), cfg.k, n, v);
      st.propose_cache.emplace(d, ok);
    }
    if (!ok) return out;
    if (from == j) {
      if (ps.from_proposer.has_value()) return out;
      ps.from_proposer = *prop;
      ps.from_proposer_enc = std::move(encoded);
    } else {
      ps.relays.emplace(from, std::move(encoded));
    }
    return out;
  }

  if (const auto* commit = std::get_if<CommitMsg>(&m.body)) {
    if (commit->signer != from) return out;  // authenticated channels
    if (!commit_correctly_formed(*commit, cfg.k, v)) return out;
    Digest d = commit->pair.digest();
    auto& per_pair = st.commits[d];
    if (per_pair.emplace(from, *commit).second) st.commit_pairs.emplace(d, commit->pair);
    return out;
  }

  if (const auto* notify = std::get_if<NotifyMsg>(&m.body)) {
    if (st.notifies.count(from)) return out;
    if (notify_correctly_formed(*notify, cfg.k, n, v)) st.notifies.emplace(from, *notify);
    return out;
  }
  return out;
}

GcOut gc_on_leader(const GcConfig& cfg, GcState& st, PartyId leader) {
  GcOut out;
  if (st.terminated || st.leader.has_value()) return out;
  st.leader = leader;
  const ProposeState& ps = st.props[leader];
  if (ps.output_set && ps.output.has_value() && !st.commit_sent) {
    st.commit_sent = true;
    CommitMsg cm;
    cm.signer = cfg.self;
    cm.k = cfg.k;
    cm.pair = *ps.output;
    cm.sig = cfg.signer.sign(commit_tag(cfg.session, cfg.slot),
                             commit_sign_payload(cfg.k, cm.pair));
    out.broadcasts.push_back(ctx_msg(cfg.slot, 0, cfg.k, cm));
  }
  return out;
}

GcConfig gc_config_for(const BlaConfig& cfg, std::uint64_t k) {
  return GcConfig{cfg.params, cfg.self, cfg.slot, k, cfg.session, cfg.signer, cfg.ledger};
}

namespace {

void merge_gc(BlaOut& out, GcOut&& child) {
  for (auto& s : child.sends) out.sends.push_back(std::move(s));
  for (auto& b : child.broadcasts) out.broadcasts.push_back(std::move(b));
  if (child.request_leader) out.request_leader = true;
}

// Reads the finished GC's output: records the grade, updates the vote on
// grade > 0, outputs on the first grade 2, then starts the next iteration.
void iteration_boundary(const BlaConfig& cfg, BlaState& st, BlaOut& out) {
  const GcOutput& g = st.gc.output.value();
  st.grades.push_back(g.grade);
  if (g.grade > 0) {
    st.current = Vote{st.iter, *g.pair, g.cert};
  }
  if (g.grade == 2 && !st.output.has_value()) {
    st.output = *g.pair;
    st.output_iter = st.iter;
    out.output_now = true;
  }
  ++st.iter;
  if (st.iter > cfg.params.kappa) {
    st.finished = true;
    return;
  }
  st.gc = GcState{};
  merge_gc(out, gc_start(gc_config_for(cfg, st.iter), st.gc, st.current));
}

}  // namespace

BlaOut bla_start(const BlaConfig& cfg, BlaState& st, Pair input) {
  BlaOut out;
  st.input = input;
  st.current = Vote{0, std::move(input), Certificate{}};
  st.iter = 1;
  st.gc = GcState{};
  merge_gc(out, gc_start(gc_config_for(cfg, 1), st.gc, st.current));
  return out;
}

BlaOut bla_step(const BlaConfig& cfg, BlaState& st, std::uint64_t u) {
  BlaOut out;
  if (st.finished || st.iter == 0 || u == 0) return out;
  const std::uint64_t iter_of_u = (u - 1) / kStepsPerIteration + 1;
  const int step = static_cast<int>((u - 1) % kStepsPerIteration) + 1;
  if (iter_of_u != st.iter) return out;  // stale step after early termination
  merge_gc(out, gc_step(gc_config_for(cfg, st.iter), st.gc, step));
  if (step == kStepsPerIteration) iteration_boundary(cfg, st, out);
  return out;
}

BlaOut bla_handle(const BlaConfig& cfg, BlaState& st, PartyId from, const ProtocolMessage& m) {
  BlaOut out;
  if (st.finished || st.iter == 0) return out;
  if (m.ctx.round != st.iter) return out;  // other-iteration traffic
  merge_gc(out, gc_handle(gc_config_for(cfg, st.iter), st.gc, from, m));
  return out;
}

BlaOut bla_on_leader(const BlaConfig& cfg, BlaState& st, std::uint64_t k, PartyId leader) {
  BlaOut out;
  if (st.finished || st.iter == 0 || k != st.iter) return out;
  merge_gc(out, gc_on_leader(gc_config_for(cfg, st.iter), st.gc, leader));
  return out;
}

}  // namespace nasmr::bla
