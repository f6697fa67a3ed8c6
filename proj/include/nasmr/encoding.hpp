#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "nasmr/bytes.hpp"

namespace nasmr::enc {

// Canonical encoding, format version 1.
//
// Layout rules (bit-exact, part of the external interface):
//   - a full encoding is VERSION byte || body
//   - a body starts with one tag byte identifying the kind
//   - integers are 8-byte big-endian
//   - byte strings are 8-byte big-endian length prefix + raw bytes
//   - sets are 8-byte big-endian count + member bodies sorted
//     lexicographically by their own encodings
//   - lists (where order is semantic, e.g. the statuses inside a Propose)
//     are count + member bodies in order
// Nested values inside a composite are encoded as bare bodies; the version
// byte marks a top-level encoding only.
inline constexpr std::uint8_t kFormatVersion = 0x01;

enum class Tag : std::uint8_t {
  DomainTag = 0x01,
  Transaction = 0x02,
  Block = 0x03,
  SignedBuffer = 0x04,
  Pair = 0x05,
  CertEntry = 0x06,
  Certificate = 0x07,
  Vote = 0x08,
  BytesSet = 0x09,

  RbcValue = 0x10,
  RbcEcho = 0x11,
  RbcReady = 0x12,
  AbaEst = 0x13,
  AbaAux = 0x14,
  AbaDone = 0x15,
  Buffer = 0x16,
  WbaValue = 0x17,
  Status = 0x18,
  Propose = 0x19,
  Commit = 0x1a,
  Notify = 0x1b,
};

class Writer {
 public:
  void tag(Tag t) { out_.push_back(static_cast<std::uint8_t>(t)); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u64(std::uint64_t v);
  void bytes(const Bytes& b);
  // Appends a pre-encoded body without a length prefix.
  void raw(const Bytes& b) { out_.insert(out_.end(), b.begin(), b.end()); }
  // Sorts the element bodies lexicographically, then writes count + elements.
  void set_of(std::vector<Bytes> elems);
  void list_of(const std::vector<Bytes>& elems);

  const Bytes& data() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}
  explicit Reader(const Bytes& data) : data_(data.data(), data.size()) {}

  bool u8(std::uint8_t& v);
  bool u64(std::uint64_t& v);
  bool bytes(Bytes& b);
  bool count(std::uint64_t& n);  // same wire form as u64
  bool done() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

// Prepends the format version to a body.
Bytes versioned(Bytes body);
// Strips and checks the version byte; returns false on mismatch.
bool unversion(const Bytes& full, Bytes& body);

}  // namespace nasmr::enc
