#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nasmr/types.hpp"

namespace nasmr {

// Transcript file: UTF-8, line-delimited. First line echoes the scenario
// config; every other line is one record
//   seq \t time \t kind \t src \t dst \t payload-hex \t note
// Bit-exact given (config, seed).
enum class RecordKind : std::uint8_t {
  Send,
  Deliver,
  Corrupt,
  Oracle,
  Output,
  Epoch,
  Note,
  Digest,
};

const char* record_kind_name(RecordKind k);
std::optional<RecordKind> record_kind_from(const std::string& s);

struct Record {
  std::uint64_t seq = 0;
  Time time = 0;
  RecordKind kind = RecordKind::Note;
  PartyId src = 0;
  PartyId dst = 0;
  Bytes payload;
  std::string note;
};

class TranscriptWriter {
 public:
  void config_line(const std::string& canonical_config);
  std::uint64_t add(Time t, RecordKind kind, PartyId src, PartyId dst, const Bytes& payload,
                    const std::string& note);
  const std::string& text() const { return text_; }
  std::uint64_t next_seq() const { return seq_; }

 private:
  std::string text_;
  std::uint64_t seq_ = 0;
};

struct ParsedTranscript {
  std::string config_text;
  std::vector<Record> records;
};

// Returns nullopt on malformed input.
std::optional<ParsedTranscript> parse_transcript(const std::string& text);

// "key=value" note field access; returns nullopt if absent.
std::optional<std::string> note_field(const std::string& note, const std::string& key);

}  // namespace nasmr
