#include <doctest.h>

#include <algorithm>
#include <map>

#include "nasmr/message.hpp"
#include "nasmr/rng.hpp"

using namespace nasmr;

namespace {

Bytes rand_bytes(Rng& rng, std::size_t max_len) {
  Bytes b(rng.uniform(max_len + 1));
  rng.fill(b.data(), b.size());
  return b;
}

Block rand_block(Rng& rng) {
  Block b;
  const std::uint64_t n = rng.uniform(4);
  for (std::uint64_t i = 0; i < n; ++i) b.insert(Transaction::make(rand_bytes(rng, 8)));
  return b;
}

Signature rand_sig(Rng& rng) {
  Signature s;
  rng.fill(s.token.bytes.data(), s.token.bytes.size());
  return s;
}

SignedBuffer rand_sb(Rng& rng) {
  return SignedBuffer{static_cast<PartyId>(1 + rng.uniform(7)), rand_block(rng), rand_sig(rng)};
}

Pair rand_pair(Rng& rng) {
  std::vector<SignedBuffer> sigma;
  const std::uint64_t n = rng.uniform(3);
  for (std::uint64_t i = 0; i < n; ++i) sigma.push_back(rand_sb(rng));
  return Pair(rand_block(rng), std::move(sigma));
}

Certificate rand_cert(Rng& rng) {
  Certificate c;
  const std::uint64_t n = rng.uniform(3);
  for (std::uint64_t i = 0; i < n; ++i) {
    c.add(CertEntry{static_cast<PartyId>(1 + rng.uniform(7)), rng.uniform(5), rand_sig(rng)});
  }
  return c;
}

Vote rand_vote(Rng& rng) {
  return Vote{rng.uniform(4), rand_pair(rng), rand_cert(rng)};
}

StatusMsg rand_status(Rng& rng) {
  return StatusMsg{static_cast<PartyId>(1 + rng.uniform(7)), rand_vote(rng), rand_sig(rng)};
}

ProtocolMessage rand_message(Rng& rng) {
  ProtocolMessage m;
  m.ctx = MsgContext{rng.uniform(3), rng.uniform(5), rng.uniform(4)};
  switch (rng.uniform(12)) {
    case 0: m.body = RbcValueMsg{rand_bytes(rng, 10)}; break;
    case 1: m.body = RbcEchoMsg{rand_bytes(rng, 10)}; break;
    case 2: m.body = RbcReadyMsg{rand_bytes(rng, 10)}; break;
    case 3: m.body = AbaEstMsg{rng.bit()}; break;
    case 4: m.body = AbaAuxMsg{rng.bit()}; break;
    case 5: m.body = AbaDoneMsg{rng.bit()}; break;
    case 6: m.body = BufferMsg{rand_sb(rng)}; break;
    case 7:
      m.body = WbaValueMsg{static_cast<PartyId>(1 + rng.uniform(7)), rng.bit(), rand_sig(rng)};
      break;
    case 8: m.body = rand_status(rng); break;
    case 9: {
      ProposeMsg pm;
      pm.proposer = static_cast<PartyId>(1 + rng.uniform(7));
      const std::uint64_t n = rng.uniform(3);
      for (std::uint64_t i = 0; i < n; ++i) pm.statuses.push_back(rand_status(rng));
      pm.sig = rand_sig(rng);
      m.body = std::move(pm);
      break;
    }
    case 10:
      m.body = CommitMsg{static_cast<PartyId>(1 + rng.uniform(7)), rng.uniform(4),
                         rand_pair(rng), rand_sig(rng)};
      break;
    default: m.body = NotifyMsg{rng.uniform(4), rand_pair(rng), rand_cert(rng)}; break;
  }
  return m;
}

}  // namespace

TEST_CASE("empty block encodes as tag plus zero count") {
  Block b;
  Bytes body = b.encode_body();
  CHECK(body.size() == 9);  // 1 tag byte + 8-byte count
  CHECK(body[0] == static_cast<std::uint8_t>(enc::Tag::Block));
  for (int i = 1; i < 9; ++i) CHECK(body[i] == 0);
  Bytes full = enc::versioned(body);
  CHECK(full.size() == 10);
  CHECK(full[0] == enc::kFormatVersion);
}

TEST_CASE("block encoding is insertion-order independent") {
  auto ta = Transaction::make(to_bytes("alpha"));
  auto tb = Transaction::make(to_bytes("beta"));
  Block b1, b2;
  b1.insert(ta);
  b1.insert(tb);
  b2.insert(tb);
  b2.insert(ta);
  CHECK(b1.encode_body() == b2.encode_body());
  CHECK(b1 == b2);
  CHECK_FALSE(b1.insert(ta));  // duplicate insertion is a no-op
  CHECK(b1.size() == 2);
}

TEST_CASE("integers are 8-byte big-endian") {
  enc::Writer w;
  w.u64(0x0102030405060708ull);
  const Bytes& d = w.data();
  REQUIRE(d.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(d[i] == i + 1);
}

TEST_CASE("canonical encoding is injective on a randomized corpus") {
  Rng rng(42, "injectivity");
  std::map<Bytes, ProtocolMessage> seen;
  int collisions = 0;
  for (int i = 0; i < 100000; ++i) {
    ProtocolMessage m = rand_message(rng);
    Bytes e = m.encode();
    auto [it, inserted] = seen.emplace(std::move(e), m);
    if (!inserted && !(it->second == m)) ++collisions;
  }
  CHECK(collisions == 0);
}

TEST_CASE("message encode/decode round-trips") {
  Rng rng(7, "roundtrip");
  for (int i = 0; i < 2000; ++i) {
    ProtocolMessage m = rand_message(rng);
    auto back = decode_message(m.encode());
    REQUIRE(back.has_value());
    CHECK(*back == m);
  }
}

TEST_CASE("decoder rejects trailing bytes and bad version") {
  ProtocolMessage m;
  m.ctx = MsgContext{1, 1, 0};
  m.body = RbcValueMsg{to_bytes("x")};
  Bytes e = m.encode();
  Bytes longer = e;
  longer.push_back(0);
  CHECK_FALSE(decode_message(longer).has_value());
  Bytes bad = e;
  bad[0] = 0x7f;
  CHECK_FALSE(decode_message(bad).has_value());
}

TEST_CASE("transaction id is a pure function of the payload") {
  auto t1 = Transaction::make(to_bytes("payload"));
  auto t2 = Transaction::make(to_bytes("payload"));
  CHECK(t1.id == t2.id);
  auto t3 = Transaction::make(to_bytes("payload2"));
  CHECK(t1.id != t3.id);
}
