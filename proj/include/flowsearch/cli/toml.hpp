#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace flowsearch::cli {

struct TomlError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// section -> key -> scalar (string / integer / double / boolean). Keys
/// before any [section] header land in the "" section.
using TomlTable = std::map<std::string, std::map<std::string, nlohmann::json>>;

/// Strict reader for the subset of TOML the config schema uses: [sections],
/// `key = value` with string, integer, float, and boolean values, and #
/// comments. Anything else is an error.
TomlTable parse_toml(const std::string& text);
TomlTable load_toml_file(const std::filesystem::path& path);

}  // namespace flowsearch::cli
