#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flowsearch/core/serde.hpp"

namespace flowsearch {

/// Thrown on unreadable files.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown on malformed JSONL lines.
struct JsonlParseError : IoError {
  using IoError::IoError;
};

std::vector<json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& lines);

/// Loads a query set from JSONL (one object per line: id, input, reference,
/// metadata). The set name defaults to the file stem.
QuerySet load_queryset_jsonl(const std::filesystem::path& path,
                             Split split = Split::kValidation);
void save_queryset_jsonl(const std::filesystem::path& path, const QuerySet& qs);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace flowsearch
