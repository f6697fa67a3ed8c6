#include "nasmr/encoding.hpp"

namespace nasmr::enc {

void Writer::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
  }
}

void Writer::bytes(const Bytes& b) {
  u64(b.size());
  out_.insert(out_.end(), b.begin(), b.end());
}

void Writer::set_of(std::vector<Bytes> elems) {
  std::sort(elems.begin(), elems.end());
  u64(elems.size());
  for (const auto& e : elems) raw(e);
}

void Writer::list_of(const std::vector<Bytes>& elems) {
  u64(elems.size());
  for (const auto& e : elems) raw(e);
}

bool Reader::u8(std::uint8_t& v) {
  if (pos_ + 1 > data_.size()) return false;
  v = data_[pos_++];
  return true;
}

bool Reader::u64(std::uint64_t& v) {
  if (pos_ + 8 > data_.size()) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
  return true;
}

bool Reader::bytes(Bytes& b) {
  std::uint64_t len = 0;
  if (!u64(len)) return false;
  if (len > remaining()) return false;
  b.assign(data_.begin() + pos_, data_.begin() + pos_ + len);
  pos_ += len;
  return true;
}

bool Reader::count(std::uint64_t& n) {
  return u64(n);
}

Bytes versioned(Bytes body) {
  Bytes out;
  out.reserve(body.size() + 1);
  out.push_back(kFormatVersion);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

bool unversion(const Bytes& full, Bytes& body) {
  if (full.empty() || full[0] != kFormatVersion) return false;
  body.assign(full.begin() + 1, full.end());
  return true;
}

}  // namespace nasmr::enc
