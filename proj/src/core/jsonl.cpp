#include "flowsearch/core/jsonl.hpp"

#include <fstream>
#include <sstream>

namespace flowsearch {

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw JsonlParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& lines) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& j : lines) out << j.dump() << '\n';
}

QuerySet load_queryset_jsonl(const std::filesystem::path& path, Split split) {
  QuerySet qs;
  qs.name = path.stem().string();
  qs.split = split;
  for (const auto& j : read_jsonl(path)) {
    qs.items.push_back(j.get<QueryItem>());
  }
  qs.validate();
  return qs;
}

void save_queryset_jsonl(const std::filesystem::path& path, const QuerySet& qs) {
  std::vector<json> lines;
  lines.reserve(qs.items.size());
  for (const auto& item : qs.items) lines.push_back(json(item));
  write_jsonl(path, lines);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

}  // namespace flowsearch
