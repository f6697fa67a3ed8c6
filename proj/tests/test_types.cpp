#include <doctest.h>

#include "nasmr/rng.hpp"
#include "nasmr/validity.hpp"

using namespace nasmr;

namespace {

struct Fixture {
  crypto::Ledger ledger{7};
  std::uint64_t session = 1;
  Slot slot = 1;

  crypto::Verifier verifier() const { return {&ledger, session, slot}; }

  SignedBuffer signed_buffer(PartyId p, const Block& buf) {
    SignedBuffer sb;
    sb.signer = p;
    sb.buffer = buf;
    sb.sig = ledger.signer_for(p).sign(buffer_tag(session, slot), buf.encode_body());
    return sb;
  }

  CertEntry commit_entry(PartyId p, std::uint64_t k_prime, const Pair& pair) {
    CertEntry e;
    e.signer = p;
    e.k_prime = k_prime;
    e.sig = ledger.signer_for(p).sign(commit_tag(session, slot),
                                      commit_sign_payload(k_prime, pair));
    return e;
  }
};

Block block_of(std::initializer_list<const char*> txs) {
  Block b;
  for (const char* t : txs) b.insert(Transaction::make(to_bytes(t)));
  return b;
}

}  // namespace

TEST_CASE("protocol params invariants") {
  ProtocolParams p{4, 1, 1, 8, true};
  CHECK_NOTHROW(p.validate());
  CHECK(p.majority() == 3);

  CHECK_THROWS_AS((ProtocolParams{4, 2, 1, 8, true}.validate()), ConfigError);  // t_a > t_s
  CHECK_THROWS_AS((ProtocolParams{4, 0, 4, 8, true}.validate()), ConfigError);  // t_s >= n
  CHECK_THROWS_AS((ProtocolParams{4, 0, 2, 8, true}.validate()), ConfigError);  // bound
  CHECK_NOTHROW((ProtocolParams{4, 0, 2, 8, false}.validate()));  // bound waived for the demo
  CHECK_THROWS_AS((ProtocolParams{4, 1, 1, 0, true}.validate()), ConfigError);  // kappa
}

TEST_CASE("pair validity per threshold") {
  Fixture f;
  Block b = block_of({"t1", "t2"});

  SUBCASE("two distinct signers, both subsets") {
    Pair pair(b, {f.signed_buffer(1, block_of({"t1"})), f.signed_buffer(2, b)});
    CHECK(pair_is_valid(pair, 1, f.verifier()));   // 2 > 1
    CHECK(pair_is_valid(pair, 0, f.verifier()));   // monotone downward in t
    CHECK_FALSE(pair_is_valid(pair, 2, f.verifier()));
  }

  SUBCASE("duplicate signers count once") {
    Pair pair(b, {f.signed_buffer(1, block_of({"t1"})), f.signed_buffer(1, b)});
    CHECK(pair.sigma().size() == 1);  // deduplicated at construction
    CHECK_FALSE(pair_is_valid(pair, 1, f.verifier()));
    CHECK(pair_is_valid(pair, 0, f.verifier()));
  }

  SUBCASE("buffer outside the block invalidates") {
    Pair pair(block_of({"t2"}), {f.signed_buffer(1, block_of({"t1"}))});
    CHECK_FALSE(pair_is_valid(pair, 0, f.verifier()));
  }

  SUBCASE("bad signature counts as absent") {
    SignedBuffer forged = f.signed_buffer(1, block_of({"t1"}));
    forged.signer = 2;  // signature no longer matches
    Pair pair(b, {forged});
    CHECK_FALSE(pair_is_valid(pair, 0, f.verifier()));
  }
}

TEST_CASE("pair validity monotone downward in t (randomized)") {
  Fixture f;
  Rng rng(5, "pair-monotone");
  for (int i = 0; i < 200; ++i) {
    Block b = block_of({"x", "y", "z"});
    std::vector<SignedBuffer> sigma;
    const std::uint64_t cnt = rng.uniform(5);
    for (std::uint64_t j = 0; j < cnt; ++j) {
      sigma.push_back(
          f.signed_buffer(static_cast<PartyId>(1 + rng.uniform(7)), block_of({"x"})));
    }
    Pair pair(b, std::move(sigma));
    for (std::uint32_t t = 1; t < 5; ++t) {
      if (pair_is_valid(pair, t, f.verifier())) {
        for (std::uint32_t lower = 0; lower < t; ++lower) {
          CHECK(pair_is_valid(pair, lower, f.verifier()));
        }
      }
    }
  }
}

TEST_CASE("vote validity") {
  Fixture f;
  Block b = block_of({"t1"});
  Pair pair(b, {f.signed_buffer(1, b), f.signed_buffer(2, b)});

  SUBCASE("k=0 with valid pair") {
    Vote v{0, pair, Certificate{}};
    CHECK(vote_is_valid(v, 4, f.verifier()));
    // k=0 equals 0-validity of the pair.
    CHECK(vote_is_valid(v, 4, f.verifier()) == pair_is_valid(pair, 0, f.verifier()));
  }

  SUBCASE("k=2 with commit entries k' >= 2 from majority") {
    Certificate c;
    c.add(f.commit_entry(1, 2, pair));
    c.add(f.commit_entry(2, 3, pair));  // per-signer k' may differ
    c.add(f.commit_entry(3, 2, pair));
    Vote v{2, pair, c};
    CHECK(vote_is_valid(v, 4, f.verifier()));  // 3 > 4/2, all k' >= 2
  }

  SUBCASE("entries with k' < k are absent") {
    Certificate c;
    c.add(f.commit_entry(1, 1, pair));
    c.add(f.commit_entry(2, 1, pair));
    c.add(f.commit_entry(3, 1, pair));
    Vote v{2, pair, c};
    CHECK_FALSE(vote_is_valid(v, 4, f.verifier()));
  }

  SUBCASE("certificate on a different pair fails") {
    Pair other(block_of({"t9"}), {f.signed_buffer(1, block_of({"t9"}))});
    Certificate c;
    c.add(f.commit_entry(1, 2, other));
    c.add(f.commit_entry(2, 2, other));
    c.add(f.commit_entry(3, 2, other));
    Vote v{2, pair, c};
    CHECK_FALSE(vote_is_valid(v, 4, f.verifier()));
  }
}

TEST_CASE("notify certificates need exact k") {
  Fixture f;
  Block b = block_of({"t1"});
  Pair pair(b, {f.signed_buffer(1, b)});
  Certificate c;
  c.add(f.commit_entry(1, 3, pair));
  c.add(f.commit_entry(2, 3, pair));
  c.add(f.commit_entry(3, 3, pair));
  CHECK(certificate_valid(c, pair, 3, CertKMode::Exact, 4, f.verifier()));
  CHECK_FALSE(certificate_valid(c, pair, 2, CertKMode::Exact, 4, f.verifier()));
  CHECK(certificate_valid(c, pair, 2, CertKMode::AtLeast, 4, f.verifier()));
}

TEST_CASE("epoch array is write-once and sequential") {
  EpochArray e;
  CHECK_FALSE(e.entered(1));
  e.enter(1);
  CHECK(e.entered(1));
  CHECK_THROWS_AS(e.enter(1), WriteOnceError);
  CHECK_THROWS_AS(e.enter(3), WriteOnceError);  // must enter 2 first
  e.enter(2);
  CHECK(e.last() == 2);
}

TEST_CASE("block log requires epoch entry and is write-once") {
  EpochArray e;
  BlockLog log;
  Block b = block_of({"t"});
  CHECK_THROWS_AS(log.write(1, b, e), WriteOnceError);
  e.enter(1);
  log.write(1, b, e);
  CHECK(log.get(1) != nullptr);
  CHECK_THROWS_AS(log.write(1, b, e), WriteOnceError);
  CHECK(log.get(2) == nullptr);
}
