#include "flowsearch/core/event_log.hpp"

#include "flowsearch/core/jsonl.hpp"

namespace flowsearch {

EventWriter::EventWriter(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw IoError("cannot open run log for writing: " + path.string());
}

void EventWriter::emit(const std::string& type, json payload) {
  payload["v"] = kLogSchemaVersion;
  payload["seq"] = seq_++;
  payload["type"] = type;
  out_ << payload.dump() << '\n';
  out_.flush();
}

std::vector<json> read_event_log(const std::filesystem::path& path) {
  auto events = read_jsonl(path);
  std::int64_t expected_seq = 0;
  for (const auto& e : events) {
    if (!e.contains("v") || !e["v"].is_number_integer())
      throw LogSchemaError("event without schema version in " + path.string());
    if (e["v"].get<int>() != kLogSchemaVersion)
      throw LogSchemaError("log schema version " + e["v"].dump() + " != supported " +
                           std::to_string(kLogSchemaVersion));
    if (!e.contains("type")) throw LogSchemaError("event without type in " + path.string());
    if (e.value("seq", std::int64_t{-1}) != expected_seq)
      throw LogSchemaError("event sequence gap at seq " + std::to_string(expected_seq));
    ++expected_seq;
  }
  return events;
}

std::vector<json> events_of_type(const std::vector<json>& events, const std::string& type) {
  std::vector<json> out;
  for (const auto& e : events) {
    if (e.value("type", std::string{}) == type) out.push_back(e);
  }
  return out;
}

}  // namespace flowsearch
