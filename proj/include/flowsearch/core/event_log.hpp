#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "flowsearch/core/serde.hpp"

namespace flowsearch {

inline constexpr int kLogSchemaVersion = 1;

/// Thrown by readers on schema-version mismatch or malformed events.
struct LogSchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Append-only JSONL event stream. Every event carries the schema version, a
/// monotone sequence number, and a type tag; payload fields are flattened into
/// the same object. Lines are flushed as written so partial runs replay.
class EventWriter {
 public:
  explicit EventWriter(const std::filesystem::path& path);

  void emit(const std::string& type, json payload = json::object());
  std::int64_t events_written() const { return seq_; }

 private:
  std::ofstream out_;
  std::int64_t seq_ = 0;
};

/// Reads a run log, validating the schema version and sequence continuity.
std::vector<json> read_event_log(const std::filesystem::path& path);

/// Events of one type, in order.
std::vector<json> events_of_type(const std::vector<json>& events, const std::string& type);

}  // namespace flowsearch
