#include "flowsearch/cli/toml.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace flowsearch::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

nlohmann::json parse_value(const std::string& raw, int lineno) {
  std::string v = trim(raw);
  if (v.empty()) throw TomlError("line " + std::to_string(lineno) + ": empty value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"')
      throw TomlError("line " + std::to_string(lineno) + ": unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) {
        ++i;
        switch (v[i]) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default:
            throw TomlError("line " + std::to_string(lineno) + ": unsupported escape \\" +
                            std::string(1, v[i]));
        }
      } else {
        out.push_back(v[i]);
      }
    }
    return out;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  try {
    std::size_t consumed = 0;
    if (v.find('.') == std::string::npos && v.find('e') == std::string::npos &&
        v.find('E') == std::string::npos) {
      long long i = std::stoll(v, &consumed);
      if (consumed == v.size()) return i;
    }
    double d = std::stod(v, &consumed);
    if (consumed == v.size()) return d;
  } catch (const std::exception&) {
    // fall through
  }
  throw TomlError("line " + std::to_string(lineno) + ": cannot parse value '" + v + "'");
}

}  // namespace

TomlTable parse_toml(const std::string& text) {
  TomlTable table;
  std::string section;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    // strip comments outside strings
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
      if (line[i] == '#' && !in_string) {
        line.resize(i);
        break;
      }
    }
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw TomlError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw TomlError("line " + std::to_string(lineno) + ": empty section name");
      table[section];  // sections may be empty
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw TomlError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw TomlError("line " + std::to_string(lineno) + ": empty key");
    if (table[section].count(key) != 0)
      throw TomlError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    table[section][key] = parse_value(t.substr(eq + 1), lineno);
  }
  return table;
}

TomlTable load_toml_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TomlError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_toml(buf.str());
}

}  // namespace flowsearch::cli
