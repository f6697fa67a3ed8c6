#include "nasmr/transcript.hpp"

#include <charconv>
#include <sstream>

namespace nasmr {

const char* record_kind_name(RecordKind k) {
  switch (k) {
    case RecordKind::Send: return "send";
    case RecordKind::Deliver: return "deliver";
    case RecordKind::Corrupt: return "corrupt";
    case RecordKind::Oracle: return "oracle";
    case RecordKind::Output: return "output";
    case RecordKind::Epoch: return "epoch";
    case RecordKind::Note: return "note";
    case RecordKind::Digest: return "digest";
  }
  return "?";
}

std::optional<RecordKind> record_kind_from(const std::string& s) {
  for (auto k : {RecordKind::Send, RecordKind::Deliver, RecordKind::Corrupt, RecordKind::Oracle,
                 RecordKind::Output, RecordKind::Epoch, RecordKind::Note, RecordKind::Digest}) {
    if (s == record_kind_name(k)) return k;
  }
  return std::nullopt;
}

void TranscriptWriter::config_line(const std::string& canonical_config) {
  text_ += "config\t";
  text_ += canonical_config;
  text_ += '\n';
}

std::uint64_t TranscriptWriter::add(Time t, RecordKind kind, PartyId src, PartyId dst,
                                    const Bytes& payload, const std::string& note) {
  std::uint64_t seq = seq_++;
  text_ += std::to_string(seq);
  text_ += '\t';
  text_ += std::to_string(t);
  text_ += '\t';
  text_ += record_kind_name(kind);
  text_ += '\t';
  text_ += std::to_string(src);
  text_ += '\t';
  text_ += std::to_string(dst);
  text_ += '\t';
  text_ += to_hex(payload);
  text_ += '\t';
  text_ += note;
  text_ += '\n';
  return seq;
}

namespace {
bool split_tabs(const std::string& line, std::vector<std::string>& out, std::size_t expected) {
  out.clear();
  std::size_t start = 0;
  while (out.size() + 1 < expected) {
    auto pos = line.find('\t', start);
    if (pos == std::string::npos) return false;
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  out.push_back(line.substr(start));
  return true;
}

template <typename T>
bool parse_num(const std::string& s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}
}  // namespace

std::optional<ParsedTranscript> parse_transcript(const std::string& text) {
  ParsedTranscript out;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  std::vector<std::string> cols;
  while (std::getline(in, line)) {
    if (first) {
      if (line.rfind("config\t", 0) != 0) return std::nullopt;
      out.config_text = line.substr(7);
      first = false;
      continue;
    }
    if (line.empty()) continue;
    if (!split_tabs(line, cols, 7)) return std::nullopt;
    Record r;
    if (!parse_num(cols[0], r.seq)) return std::nullopt;
    if (!parse_num(cols[1], r.time)) return std::nullopt;
    auto kind = record_kind_from(cols[2]);
    if (!kind) return std::nullopt;
    r.kind = *kind;
    if (!parse_num(cols[3], r.src)) return std::nullopt;
    if (!parse_num(cols[4], r.dst)) return std::nullopt;
    if (!from_hex(cols[5], r.payload)) return std::nullopt;
    r.note = cols[6];
    out.records.push_back(std::move(r));
  }
  if (first) return std::nullopt;
  return out;
}

std::optional<std::string> note_field(const std::string& note, const std::string& key) {
  std::string prefix = key + "=";
  std::size_t pos = 0;
  while (pos < note.size()) {
    std::size_t end = note.find(' ', pos);
    if (end == std::string::npos) end = note.size();
    if (note.compare(pos, prefix.size(), prefix) == 0) {
      return note.substr(pos + prefix.size(), end - pos - prefix.size());
    }
    pos = end + 1;
  }
  return std::nullopt;
}

}  // namespace nasmr
