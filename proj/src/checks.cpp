#include "nasmr/checks.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <set>

#include "nasmr/acs.hpp"
#include "nasmr/adversary.hpp"
#include "nasmr/message.hpp"
#include "nasmr/smr.hpp"

namespace nasmr {

namespace {

std::uint64_t parse_u64(const std::string& s, std::uint64_t fallback = 0) {
  std::uint64_t v = fallback;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

// Shared pre-digested view of a transcript.
struct View {
  const ParsedTranscript* t = nullptr;
  const ScenarioConfig* cfg = nullptr;

  std::map<PartyId, Time> corrupted_at;  // party -> corruption time
  std::map<std::uint64_t, const Record*> sends_by_env;
  std::map<std::uint64_t, const Record*> delivers_by_env;
  // Output records per party, in transcript order, split by kind word.
  std::map<PartyId, std::vector<const Record*>> outputs;
  std::map<PartyId, std::vector<const Record*>> epochs;
  std::map<PartyId, std::string> summaries;  // final Note records

  bool honest(PartyId p) const { return corrupted_at.find(p) == corrupted_at.end(); }
  std::vector<PartyId> honest_parties() const {
    std::vector<PartyId> out;
    for (PartyId p = 1; p <= cfg->params.n; ++p) {
      if (honest(p)) out.push_back(p);
    }
    return out;
  }
  // Was the party honest when it produced the record (adaptive corruption)?
  bool honest_at(PartyId p, const Record& r) const {
    auto it = corrupted_at.find(p);
    return it == corrupted_at.end() || r.time < it->second;
  }

  std::string output_kind(const Record& r) const {
    auto pos = r.note.find(' ');
    return pos == std::string::npos ? r.note : r.note.substr(0, pos);
  }

  std::vector<const Record*> outputs_of(PartyId p, const std::string& kind) const {
    std::vector<const Record*> out;
    auto it = outputs.find(p);
    if (it == outputs.end()) return out;
    for (const Record* r : it->second) {
      if (output_kind(*r) == kind) out.push_back(r);
    }
    return out;
  }

  Bytes input_payload(PartyId p) const {
    auto it = cfg->inputs.find(p);
    return it != cfg->inputs.end() ? it->second : to_bytes("tx-p" + std::to_string(p));
  }
};

View build_view(const ParsedTranscript& t, const ScenarioConfig& cfg) {
  View v;
  v.t = &t;
  v.cfg = &cfg;
  for (const Record& r : t.records) {
    switch (r.kind) {
      case RecordKind::Corrupt:
        v.corrupted_at.emplace(r.src, r.time);
        break;
      case RecordKind::Send:
        if (auto env = note_field(r.note, "env")) v.sends_by_env[parse_u64(*env)] = &r;
        break;
      case RecordKind::Deliver:
        if (auto env = note_field(r.note, "env")) v.delivers_by_env[parse_u64(*env)] = &r;
        break;
      case RecordKind::Output:
        v.outputs[r.src].push_back(&r);
        break;
      case RecordKind::Epoch:
        v.epochs[r.src].push_back(&r);
        break;
      case RecordKind::Note:
        if (r.src != 0) v.summaries[r.src] = r.note;  // last wins: the final summary
        break;
      default:
        break;
    }
  }
  return v;
}

using CheckFn = std::function<CheckResult(const View&)>;

CheckResult pass(const std::string& name, const std::string& note = "") {
  return {name, true, std::nullopt, note};
}
CheckResult fail(const std::string& name, const Record* r, const std::string& note) {
  CheckResult c{name, false, std::nullopt, note};
  if (r) c.first_violation_seq = r->seq;
  return c;
}

// ---- generic network checks ----

CheckResult check_sync_bound(const View& v) {
  if (v.cfg->net.mode != NetConfig::Mode::Sync) return pass("sync-bound", "async: skipped");
  for (const auto& [env, del] : v.delivers_by_env) {
    auto it = v.sends_by_env.find(env);
    if (it == v.sends_by_env.end()) return fail("sync-bound", del, "deliver without send");
    if (del->time - it->second->time > v.cfg->net.delta) {
      return fail("sync-bound", del, "delta exceeded env=" + std::to_string(env));
    }
  }
  return pass("sync-bound");
}

CheckResult check_eventual_delivery(const View& v) {
  for (const auto& [env, snd] : v.sends_by_env) {
    auto it = v.delivers_by_env.find(env);
    if (it == v.delivers_by_env.end() || it->second->time >= v.cfg->net.horizon) {
      return fail("eventual-delivery", snd, "undelivered env=" + std::to_string(env));
    }
  }
  return pass("eventual-delivery");
}

CheckResult check_budget(const View& v) {
  if (v.corrupted_at.size() > v.cfg->budget) {
    return fail("budget", nullptr,
                "corrupted=" + std::to_string(v.corrupted_at.size()) +
                    " budget=" + std::to_string(v.cfg->budget));
  }
  return pass("budget");
}

// ---- rbc ----

CheckResult check_rbc_validity(const View& v) {
  const PartyId sender = v.cfg->rbc_sender;
  if (!v.honest(sender)) return pass("rbc-validity", "corrupted sender: skipped");
  const Bytes expected = v.input_payload(sender);
  for (PartyId p : v.honest_parties()) {
    auto outs = v.outputs_of(p, "rbc");
    if (outs.empty()) return fail("rbc-validity", nullptr, "no output at " + std::to_string(p));
    if (outs[0]->payload != expected) return fail("rbc-validity", outs[0], "wrong value");
  }
  return pass("rbc-validity");
}

CheckResult check_rbc_consistency(const View& v) {
  std::optional<Bytes> seen;
  bool any = false;
  for (PartyId p : v.honest_parties()) {
    for (const Record* r : v.outputs_of(p, "rbc")) {
      any = true;
      if (!seen) {
        seen = r->payload;
      } else if (*seen != r->payload) {
        return fail("rbc-consistency", r, "differing outputs");
      }
    }
  }
  if (any) {
    for (PartyId p : v.honest_parties()) {
      if (v.outputs_of(p, "rbc").empty()) {
        return fail("rbc-consistency", nullptr,
                    "party " + std::to_string(p) + " never output");
      }
    }
  }
  return pass("rbc-consistency", any ? "outputs" : "no honest output (allowed)");
}

CheckResult check_rbc_echo_once(const View& v) {
  std::map<PartyId, int> echoes, readies;
  for (const Record& r : v.t->records) {
    if (r.kind != RecordKind::Send) continue;
    if (!v.honest_at(r.src, r)) continue;
    auto m = decode_message(r.payload);
    if (!m) continue;
    if (m->kind() == MsgKind::RbcEcho && r.dst == 1) ++echoes[r.src];
    if (m->kind() == MsgKind::RbcReady && r.dst == 1) ++readies[r.src];
    if (echoes[r.src] > 1 || readies[r.src] > 1) {
      return fail("rbc-echo-once", &r, "honest party echoed/readied twice");
    }
  }
  return pass("rbc-echo-once");
}

// ---- aba ----

CheckResult check_aba_agreement(const View& v) {
  std::optional<Bytes> seen;
  for (PartyId p : v.honest_parties()) {
    for (const Record* r : v.outputs_of(p, "aba")) {
      if (!seen) {
        seen = r->payload;
      } else if (*seen != r->payload) {
        return fail("aba-agreement", r, "differing decisions");
      }
    }
  }
  return pass("aba-agreement");
}

CheckResult check_aba_validity(const View& v) {
  std::optional<bool> unanimous;
  for (PartyId p : v.honest_parties()) {
    auto it = v.cfg->bits.find(p);
    if (it == v.cfg->bits.end()) return pass("aba-validity", "no bits: skipped");
    if (!unanimous) {
      unanimous = it->second;
    } else if (*unanimous != it->second) {
      return pass("aba-validity", "inputs not unanimous: skipped");
    }
  }
  const Bytes expected{static_cast<std::uint8_t>(*unanimous ? 1 : 0)};
  for (PartyId p : v.honest_parties()) {
    for (const Record* r : v.outputs_of(p, "aba")) {
      if (r->payload != expected) return fail("aba-validity", r, "decided against unanimity");
    }
  }
  return pass("aba-validity");
}

CheckResult check_aba_termination(const View& v) {
  for (PartyId p : v.honest_parties()) {
    if (v.outputs_of(p, "aba").empty()) {
      return fail("aba-termination", nullptr, "no decision at " + std::to_string(p));
    }
  }
  return pass("aba-termination");
}

CheckResult check_aba_halt_safety(const View& v) {
  // After a party's DONE for an instance, it sends nothing further there.
  std::map<std::tuple<PartyId, Slot, std::uint64_t>, bool> done_sent;
  for (const Record& r : v.t->records) {
    if (r.kind != RecordKind::Send || r.dst != 1) continue;
    auto m = decode_message(r.payload);
    if (!m) continue;
    const auto kind = m->kind();
    if (kind != MsgKind::AbaEst && kind != MsgKind::AbaAux && kind != MsgKind::AbaDone) continue;
    auto key = std::make_tuple(r.src, m->ctx.slot, m->ctx.inst);
    if (done_sent[key]) return fail("aba-halt-safety", &r, "send after DONE");
    if (kind == MsgKind::AbaDone) done_sent[key] = true;
  }
  return pass("aba-halt-safety");
}

// ---- acs ----

CheckResult check_acs_consistency(const View& v) {
  std::optional<Bytes> seen;
  for (PartyId p : v.honest_parties()) {
    for (const Record* r : v.outputs_of(p, "acs")) {
      if (!seen) {
        seen = r->payload;
      } else if (*seen != r->payload) {
        return fail("acs-consistency", r, "differing sets");
      }
    }
  }
  return pass("acs-consistency");
}

CheckResult check_acs_liveness(const View& v) {
  for (PartyId p : v.honest_parties()) {
    if (v.outputs_of(p, "acs").empty()) {
      return fail("acs-liveness", nullptr, "no output at " + std::to_string(p));
    }
  }
  return pass("acs-liveness");
}

CheckResult check_acs_validity(const View& v) {
  std::optional<Bytes> unanimous;
  for (PartyId p : v.honest_parties()) {
    Bytes in = Block::single(v.input_payload(p)).encode_body();
    if (!unanimous) {
      unanimous = in;
    } else if (*unanimous != in) {
      return pass("acs-validity", "inputs not unanimous: skipped");
    }
  }
  const Bytes expected = acs::encode_bytes_set({*unanimous});
  for (PartyId p : v.honest_parties()) {
    for (const Record* r : v.outputs_of(p, "acs")) {
      if (r->payload != expected) return fail("acs-validity", r, "output != {v}");
    }
  }
  return pass("acs-validity");
}

CheckResult check_acs_set_quality(const View& v) {
  for (PartyId p : v.honest_parties()) {
    for (const Record* r : v.outputs_of(p, "acs")) {
      auto set = acs::decode_bytes_set(r->payload);
      if (!set) return fail("acs-set-quality", r, "undecodable output");
      std::set<Bytes> values(set->begin(), set->end());
      std::uint32_t honest_in = 0;
      for (PartyId q : v.honest_parties()) {
        if (values.count(Block::single(v.input_payload(q)).encode_body())) ++honest_in;
      }
      if (honest_in < v.cfg->params.t_a + 1) {
        return fail("acs-set-quality", r,
                    "only " + std::to_string(honest_in) + " honest inputs present");
      }
    }
  }
  return pass("acs-set-quality");
}

CheckResult check_acs_quiescence(const View& v) {
  for (PartyId p : v.honest_parties()) {
    auto it = v.summaries.find(p);
    if (it == v.summaries.end()) return fail("acs-quiescence", nullptr, "no summary");
    auto states = note_field(it->second, "abastates");
    if (!states) return fail("acs-quiescence", nullptr, "no abastates in summary");
    for (char c : *states) {
      if (c != 'd' && c != 'h') {
        return fail("acs-quiescence", nullptr,
                    "party " + std::to_string(p) + " states=" + *states);
      }
    }
  }
  return pass("acs-quiescence");
}

CheckResult check_acs_exit_range(const View& v) {
  for (PartyId p : v.honest_parties()) {
    auto outs = v.outputs_of(p, "acs");
    if (outs.size() > 1) return fail("acs-exit-range", outs[1], "duplicate output");
    for (const Record* r : outs) {
      auto exit = note_field(r->note, "exit");
      if (!exit || (*exit != "1" && *exit != "2" && *exit != "3")) {
        return fail("acs-exit-range", r, "bad exit tag");
      }
    }
  }
  return pass("acs-exit-range");
}

// ---- gc / bla ----

CheckResult check_gc_grades(const View& v) {
  std::optional<Bytes> grade2_pair;
  for (PartyId p : v.honest_parties()) {
    for (const Record* r : v.outputs_of(p, "gc")) {
      if (note_field(r->note, "grade") == std::optional<std::string>("2")) {
        if (grade2_pair && *grade2_pair != r->payload) {
          return fail("gc-grade-consistency", r, "two grade-2 pairs");
        }
        grade2_pair = r->payload;
      }
    }
  }
  if (grade2_pair) {
    for (PartyId p : v.honest_parties()) {
      for (const Record* r : v.outputs_of(p, "gc")) {
        auto g = note_field(r->note, "grade").value_or("0");
        if (g == "0") return fail("gc-grade-consistency", r, "grade 0 next to grade 2");
        if (r->payload != *grade2_pair) {
          return fail("gc-grade-consistency", r, "nonzero grade on different pair");
        }
      }
    }
  }
  return pass("gc-grade-consistency");
}

CheckResult check_gc_commit_uniqueness(const View& v) {
  // Standalone GC: once any honest party holds a nonzero grade, no honest
  // Commit (in that single iteration) names a different pair. Inside BLA the
  // same lemma applies from the first output's iteration onward.
  std::optional<Bytes> nonzero_pair;
  std::uint64_t from_iter = 1;
  for (PartyId p : v.honest_parties()) {
    for (const Record* r : v.outputs_of(p, "gc")) {
      auto g = note_field(r->note, "grade").value_or("0");
      if (g != "0") nonzero_pair = r->payload;
    }
  }
  if (!nonzero_pair) {
    for (const Record& rec : v.t->records) {
      if (rec.kind != RecordKind::Output || !v.honest(rec.src)) continue;
      if (v.output_kind(rec) != "bla") continue;
      nonzero_pair = rec.payload;
      from_iter = parse_u64(note_field(rec.note, "iter").value_or("1"), 1);
      break;
    }
  }
  if (!nonzero_pair) return pass("gc-commit-uniqueness", "no nonzero grade");
  for (const Record& r : v.t->records) {
    if (r.kind != RecordKind::Send || r.dst != 1) continue;
    if (!v.honest_at(r.src, r)) continue;
    auto m = decode_message(r.payload);
    if (!m || m->kind() != MsgKind::Commit) continue;
    if (m->ctx.round < from_iter) continue;
    const auto& cm = std::get<CommitMsg>(m->body);
    if (cm.pair.encode_body() != *nonzero_pair) {
      return fail("gc-commit-uniqueness", &r, "honest commit on conflicting pair");
    }
  }
  return pass("gc-commit-uniqueness");
}

CheckResult check_bla_agreement(const View& v) {
  std::optional<Bytes> seen;
  for (PartyId p : v.honest_parties()) {
    auto outs = v.outputs_of(p, "bla");
    if (outs.empty()) return fail("bla-agreement", nullptr, "no output at " + std::to_string(p));
    auto iter = parse_u64(note_field(outs[0]->note, "iter").value_or("0"));
    if (iter == 0 || iter > v.cfg->params.kappa) {
      return fail("bla-agreement", outs[0], "output outside kappa iterations");
    }
    if (!seen) {
      seen = outs[0]->payload;
    } else if (*seen != outs[0]->payload) {
      return fail("bla-agreement", outs[0], "differing outputs");
    }
  }
  return pass("bla-agreement");
}

// Structural s-validity of the agreed pair (signatures are checked in-run;
// offline we verify shape: distinct signers > s and buffers inside the block).
CheckResult check_bla_validity(const View& v) {
  const std::uint32_t s = v.cfg->params.t_s;
  for (PartyId p : v.honest_parties()) {
    for (const Record* r : v.outputs_of(p, "bla")) {
      enc::Reader rd(r->payload);
      auto pair = Pair::decode_body(rd);
      if (!pair || !rd.done()) return fail("bla-validity", r, "undecodable pair");
      std::set<PartyId> signers;
      for (const auto& sb : pair->sigma()) {
        if (!sb.buffer.subset_of(pair->block())) {
          return fail("bla-validity", r, "buffer not a subset of block");
        }
        signers.insert(sb.signer);
      }
      const bool want_svalid = v.cfg->net.mode == NetConfig::Mode::Sync;
      if (signers.empty() || (want_svalid && signers.size() <= s)) {
        return fail("bla-validity", r, "too few distinct signers");
      }
    }
  }
  return pass("bla-validity");
}

CheckResult check_bla_persistence(const View& v) {
  // First honest output fixes (B, Sigma); later honest Status votes must be
  // k'-votes on it with k' >= that iteration.
  const Record* first_out = nullptr;
  std::uint64_t out_iter = 0;
  for (const Record& r : v.t->records) {
    if (r.kind != RecordKind::Output) continue;
    if (!v.honest(r.src)) continue;
    if (v.output_kind(r) != "bla") continue;
    first_out = &r;
    out_iter = parse_u64(note_field(r.note, "iter").value_or("0"));
    break;
  }
  if (!first_out) return pass("bla-persistence", "no output");
  for (const Record& r : v.t->records) {
    if (r.seq <= first_out->seq || r.kind != RecordKind::Send) continue;
    if (!v.honest_at(r.src, r)) continue;
    auto m = decode_message(r.payload);
    if (!m || m->kind() != MsgKind::Status) continue;
    const auto& sm = std::get<StatusMsg>(m->body);
    if (sm.signer != r.src) continue;
    if (sm.vote.pair.encode_body() != first_out->payload || sm.vote.k < out_iter) {
      return fail("bla-persistence", &r, "vote moved off the decided pair");
    }
  }
  return pass("bla-persistence");
}

// ---- smr / wba ----

CheckResult check_smr_consistency(const View& v) {
  std::map<std::uint64_t, Bytes> per_slot;
  for (PartyId p : v.honest_parties()) {
    for (const Record* r : v.outputs_of(p, "smr-block")) {
      auto slot = parse_u64(note_field(r->note, "slot").value_or("0"));
      auto it = per_slot.find(slot);
      if (it == per_slot.end()) {
        per_slot.emplace(slot, r->payload);
      } else if (it->second != r->payload) {
        return fail("smr-consistency", r, "slot " + std::to_string(slot) + " differs");
      }
    }
  }
  return pass("smr-consistency");
}

CheckResult check_smr_completeness(const View& v) {
  for (PartyId p : v.honest_parties()) {
    std::set<std::uint64_t> done;
    for (const Record* r : v.outputs_of(p, "smr-block")) {
      done.insert(parse_u64(note_field(r->note, "slot").value_or("0")));
    }
    for (std::uint64_t k = 1; k <= v.cfg->slots; ++k) {
      if (!done.count(k)) {
        return fail("smr-completeness", nullptr,
                    "party " + std::to_string(p) + " missing slot " + std::to_string(k));
      }
    }
  }
  return pass("smr-completeness");
}

CheckResult check_smr_liveness(const View& v) {
  auto honest = v.honest_parties();
  for (const auto& tx : v.cfg->txs) {
    // The guarantee only applies to txs every honest party received.
    std::set<PartyId> targets(tx.targets.begin(), tx.targets.end());
    bool all_honest_target = true;
    for (PartyId p : honest) {
      if (!tx.targets.empty() && !targets.count(p)) all_honest_target = false;
    }
    if (!all_honest_target) continue;

    const Digest txid = Transaction::make(tx.payload).id;
    for (PartyId p : honest) {
      // Smallest epoch j entered at or after the injection.
      std::optional<std::uint64_t> j_star;
      for (const Record* e : v.epochs.count(p) ? v.epochs.at(p) : std::vector<const Record*>{}) {
        if (e->time >= tx.time) {
          j_star = parse_u64(note_field(e->note, "slot").value_or("0"));
          break;
        }
      }
      if (!j_star) continue;  // injected after the last epoch: claim is vacuous
      bool included = false;
      bool all_slots_present = true;
      std::set<std::uint64_t> have;
      for (const Record* r : v.outputs_of(p, "smr-block")) {
        auto slot = parse_u64(note_field(r->note, "slot").value_or("0"));
        have.insert(slot);
        if (slot > *j_star) continue;
        enc::Reader rd(r->payload);
        auto blk = Block::decode_body(rd);
        if (blk && blk->contains(txid)) included = true;
      }
      for (std::uint64_t k = 1; k <= *j_star; ++k) {
        if (!have.count(k)) all_slots_present = false;
      }
      if (!all_slots_present) continue;  // truncated run: slots <= j* incomplete
      if (!included) {
        return fail("smr-liveness", nullptr,
                    "tx missing by slot " + std::to_string(*j_star) + " at party " +
                        std::to_string(p));
      }
    }
  }
  return pass("smr-liveness");
}

CheckResult check_smr_epochs(const View& v) {
  for (PartyId p : v.honest_parties()) {
    std::uint64_t prev = 0;
    std::map<std::uint64_t, std::uint64_t> entry_seq;
    if (v.epochs.count(p)) {
      for (const Record* e : v.epochs.at(p)) {
        auto j = parse_u64(note_field(e->note, "slot").value_or("0"));
        if (j != prev + 1) return fail("smr-epoch-discipline", e, "epochs out of order");
        prev = j;
        entry_seq[j] = e->seq;
      }
    }
    for (const Record* r : v.outputs_of(p, "smr-block")) {
      auto slot = parse_u64(note_field(r->note, "slot").value_or("0"));
      auto it = entry_seq.find(slot);
      if (it == entry_seq.end() || it->second > r->seq) {
        return fail("smr-epoch-discipline", r, "block before epoch entry");
      }
    }
  }
  return pass("smr-epoch-discipline");
}

CheckResult check_wba_agreement(const View& v) {
  std::optional<Bytes> seen;
  for (PartyId p : v.honest_parties()) {
    for (const Record* r : v.outputs_of(p, "wba")) {
      if (!seen) {
        seen = r->payload;
      } else if (*seen != r->payload) {
        return fail("wba-agreement", r, "differing bits");
      }
    }
  }
  return pass("wba-agreement");
}

CheckResult check_wba_validity(const View& v) {
  std::optional<bool> unanimous;
  for (PartyId p : v.honest_parties()) {
    auto it = v.cfg->bits.find(p);
    if (it == v.cfg->bits.end()) return pass("wba-validity", "no bits: skipped");
    if (!unanimous) {
      unanimous = it->second;
    } else if (*unanimous != it->second) {
      return pass("wba-validity", "inputs not unanimous: skipped");
    }
  }
  const Bytes expected{static_cast<std::uint8_t>(*unanimous ? 1 : 0)};
  for (PartyId p : v.honest_parties()) {
    for (const Record* r : v.outputs_of(p, "wba")) {
      if (r->payload != expected) return fail("wba-validity", r, "output against unanimity");
    }
  }
  return pass("wba-validity");
}

CheckResult check_wba_termination(const View& v) {
  for (PartyId p : v.honest_parties()) {
    if (v.outputs_of(p, "wba").empty()) {
      return fail("wba-termination", nullptr, "no output at " + std::to_string(p));
    }
  }
  return pass("wba-termination");
}

// ---- oracle secrecy ----

CheckResult check_leader_secrecy(const View& v) {
  std::map<std::string, std::set<PartyId>> requests;
  for (const Record& r : v.t->records) {
    if (r.kind != RecordKind::Oracle) continue;
    if (r.note.rfind("leader-req", 0) == 0) {
      auto slot = note_field(r.note, "slot").value_or("");
      auto k = note_field(r.note, "k").value_or("");
      requests[slot + "/" + k].insert(r.src);
    } else if (r.note.rfind("leader-reveal", 0) == 0) {
      auto slot = note_field(r.note, "slot").value_or("");
      auto k = note_field(r.note, "k").value_or("");
      if (requests[slot + "/" + k].size() <= v.cfg->params.n / 2) {
        return fail("leader-secrecy", &r, "reveal before majority of requests");
      }
    }
  }
  return pass("leader-secrecy");
}

CheckResult check_coin_secrecy(const View& v) {
  std::map<std::string, std::set<PartyId>> requests;
  for (const Record& r : v.t->records) {
    if (r.kind != RecordKind::Oracle) continue;
    auto key = note_field(r.note, "slot").value_or("") + "/" +
               note_field(r.note, "i").value_or("") + "/" + note_field(r.note, "r").value_or("");
    if (r.note.rfind("coin-req", 0) == 0) {
      requests[key].insert(r.src);
    } else if (r.note.rfind("coin-reveal", 0) == 0) {
      if (requests[key].size() < v.cfg->params.t_a + 1) {
        return fail("coin-secrecy", &r, "reveal before quorum of requests");
      }
    }
  }
  return pass("coin-secrecy");
}

// ---- lower-bound demo ----

CheckResult check_lb_violation(const View& v) {
  const Digest m0 = Transaction::make(lower_bound_payload(v.cfg->net.seed, 0)).id;
  const Digest m1 = Transaction::make(lower_bound_payload(v.cfg->net.seed, 1)).id;
  bool any = false;
  for (PartyId p : v.honest_parties()) {
    const int side = split_world_side(v.cfg->params, p);
    if (side < 0) continue;
    for (const Record* r : v.outputs_of(p, "smr-block")) {
      if (parse_u64(note_field(r->note, "slot").value_or("0")) != 1) continue;
      any = true;
      enc::Reader rd(r->payload);
      auto blk = Block::decode_body(rd);
      if (!blk) return fail("lb-violation", r, "undecodable block");
      const Digest& mine = side == 0 ? m0 : m1;
      const Digest& other = side == 0 ? m1 : m0;
      if (!blk->contains(mine) || blk->contains(other)) {
        return fail("lb-violation", r, "camp block membership not split");
      }
    }
  }
  if (!any) return fail("lb-violation", nullptr, "no slot-1 blocks produced");
  return pass("lb-violation", "slot-1 logs disagree across camps");
}

// ---- metrics ----

void fill_metrics(const View& v, CheckReport& rep) {
  std::map<std::string, std::uint64_t> msg_counts;
  for (const auto& [env, snd] : v.sends_by_env) {
    auto m = decode_message(snd->payload);
    if (m) ++msg_counts[msg_kind_name(m->kind())];
  }
  for (const auto& [k, c] : msg_counts) {
    rep.metrics["msgs." + k] = std::to_string(c);
  }

  // Slots completed (minimum over honest parties) and mean block latency.
  std::uint64_t min_slots = UINT64_MAX;
  double latency_sum = 0;
  std::uint64_t latency_n = 0;
  for (PartyId p : v.honest_parties()) {
    std::map<std::uint64_t, Time> entry;
    if (v.epochs.count(p)) {
      for (const Record* e : v.epochs.at(p)) {
        entry[parse_u64(note_field(e->note, "slot").value_or("0"))] = e->time;
      }
    }
    std::uint64_t done = 0;
    for (const Record* r : v.outputs_of(p, "smr-block")) {
      ++done;
      auto slot = parse_u64(note_field(r->note, "slot").value_or("0"));
      if (entry.count(slot)) {
        latency_sum += static_cast<double>(r->time - entry[slot]);
        ++latency_n;
      }
    }
    min_slots = std::min(min_slots, done);
  }
  if (min_slots != UINT64_MAX && (v.cfg->protocol == "smr" || v.cfg->protocol == "wba")) {
    rep.metrics["slots-completed"] = std::to_string(min_slots);
    if (latency_n > 0) {
      rep.metrics["mean-slot-latency"] =
          std::to_string(latency_sum / static_cast<double>(latency_n));
    }
  }

  // GC grade-2 rate from bla summaries (iterations up to first success).
  std::uint64_t g2 = 0, considered = 0;
  for (PartyId p : v.honest_parties()) {
    auto it = v.summaries.find(p);
    if (it == v.summaries.end()) continue;
    auto grades = note_field(it->second, "grades");
    if (!grades) continue;
    std::string g = *grades;
    for (std::size_t pos = 0; pos < g.size(); pos += 2) {
      ++considered;
      if (g[pos] == '2') {
        ++g2;
        break;
      }
    }
  }
  if (considered > 0) {
    rep.metrics["gc-grade2-successes"] = std::to_string(g2);
    rep.metrics["gc-iterations-considered"] = std::to_string(considered);
  }

  // Mean ABA decision round.
  std::uint64_t rounds = 0, decisions = 0;
  for (PartyId p : v.honest_parties()) {
    for (const Record* r : v.outputs_of(p, "aba")) {
      rounds += parse_u64(note_field(r->note, "r").value_or("0"));
      ++decisions;
    }
  }
  if (decisions > 0) {
    rep.metrics["aba-decisions"] = std::to_string(decisions);
    rep.metrics["aba-round-sum"] = std::to_string(rounds);
  }
}

const std::map<std::string, CheckFn>& registry() {
  static const std::map<std::string, CheckFn> reg = {
      {"sync-bound", check_sync_bound},
      {"eventual-delivery", check_eventual_delivery},
      {"budget", check_budget},
      {"rbc-validity", check_rbc_validity},
      {"rbc-consistency", check_rbc_consistency},
      {"rbc-echo-once", check_rbc_echo_once},
      {"aba-agreement", check_aba_agreement},
      {"aba-validity", check_aba_validity},
      {"aba-termination", check_aba_termination},
      {"aba-halt-safety", check_aba_halt_safety},
      {"acs-validity", check_acs_validity},
      {"acs-consistency", check_acs_consistency},
      {"acs-liveness", check_acs_liveness},
      {"acs-set-quality", check_acs_set_quality},
      {"acs-quiescence", check_acs_quiescence},
      {"acs-exit-range", check_acs_exit_range},
      {"gc-grade-consistency", check_gc_grades},
      {"gc-commit-uniqueness", check_gc_commit_uniqueness},
      {"bla-agreement", check_bla_agreement},
      {"bla-validity", check_bla_validity},
      {"bla-persistence", check_bla_persistence},
      {"smr-consistency", check_smr_consistency},
      {"smr-completeness", check_smr_completeness},
      {"smr-liveness", check_smr_liveness},
      {"smr-epoch-discipline", check_smr_epochs},
      {"wba-agreement", check_wba_agreement},
      {"wba-validity", check_wba_validity},
      {"wba-termination", check_wba_termination},
      {"leader-secrecy", check_leader_secrecy},
      {"coin-secrecy", check_coin_secrecy},
      {"lb-violation", check_lb_violation},
  };
  return reg;
}

}  // namespace

bool CheckReport::all_pass() const {
  for (const auto& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

std::string CheckReport::render() const {
  std::string out;
  for (const auto& r : results) {
    out += "check\t" + r.name + "\t" + (r.pass ? "pass" : "fail") + "\t";
    out += r.first_violation_seq ? std::to_string(*r.first_violation_seq) : std::string("-");
    out += "\t" + r.note + "\n";
  }
  for (const auto& [k, val] : metrics) {
    out += "metric\t" + k + "\t" + val + "\n";
  }
  return out;
}

std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& [k, fn] : registry()) out.push_back(k);
  return out;
}

bool check_known(const std::string& name) {
  return registry().count(name) != 0;
}

std::vector<std::string> default_checks(const std::string& protocol, NetConfig::Mode mode) {
  std::vector<std::string> out = {"budget"};
  if (mode == NetConfig::Mode::Sync) {
    out.push_back("sync-bound");
  } else {
    out.push_back("eventual-delivery");
  }
  if (protocol == "rbc") {
    out.insert(out.end(), {"rbc-validity", "rbc-consistency", "rbc-echo-once"});
  } else if (protocol == "aba") {
    out.insert(out.end(),
               {"aba-agreement", "aba-validity", "aba-termination", "aba-halt-safety",
                "coin-secrecy"});
  } else if (protocol == "acs") {
    out.insert(out.end(), {"acs-validity", "acs-consistency", "acs-liveness", "acs-set-quality",
                           "acs-quiescence", "acs-exit-range", "aba-halt-safety", "coin-secrecy"});
  } else if (protocol == "gc") {
    out.insert(out.end(), {"gc-grade-consistency", "gc-commit-uniqueness", "leader-secrecy"});
  } else if (protocol == "bla") {
    out.insert(out.end(),
               {"bla-agreement", "bla-validity", "bla-persistence", "gc-commit-uniqueness",
                "leader-secrecy"});
  } else if (protocol == "smr") {
    out.insert(out.end(), {"smr-consistency", "smr-completeness", "smr-liveness",
                           "smr-epoch-discipline", "leader-secrecy"});
  } else if (protocol == "wba") {
    out.insert(out.end(),
               {"wba-agreement", "wba-validity", "wba-termination", "smr-consistency",
                "smr-epoch-discipline"});
  }
  return out;
}

CheckReport run_checks(const ParsedTranscript& t, const ScenarioConfig& cfg,
                       const std::vector<std::string>& names) {
  View v = build_view(t, cfg);
  std::vector<std::string> todo = names;
  if (todo.empty()) todo = cfg.checks;
  if (todo.empty()) todo = default_checks(cfg.protocol, cfg.net.mode);

  CheckReport rep;
  for (const auto& name : todo) {
    auto it = registry().find(name);
    if (it == registry().end()) {
      rep.results.push_back({name, false, std::nullopt, "unknown check"});
      continue;
    }
    rep.results.push_back(it->second(v));
  }
  fill_metrics(v, rep);
  return rep;
}

}  // namespace nasmr
