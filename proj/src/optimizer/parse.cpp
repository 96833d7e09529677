#include "flowsearch/optimizer/parse.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

namespace flowsearch::opt {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::optional<std::string> last_tag(const std::string& raw, const std::string& tag) {
  const std::string open = "<" + tag + ">";
  const std::string close = "</" + tag + ">";
  std::size_t start = raw.rfind(open);
  if (start == std::string::npos) return std::nullopt;
  std::size_t body = start + open.size();
  std::size_t end = raw.find(close, body);
  if (end == std::string::npos) return std::nullopt;
  return raw.substr(body, end - body);
}

std::optional<std::string> first_tag(const std::string& raw, const std::string& tag) {
  const std::string open = "<" + tag + ">";
  const std::string close = "</" + tag + ">";
  std::size_t start = raw.find(open);
  if (start == std::string::npos) return std::nullopt;
  std::size_t body = start + open.size();
  std::size_t end = raw.find(close, body);
  if (end == std::string::npos) return std::nullopt;
  return raw.substr(body, end - body);
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::optional<OperatorCall> parse_operator_line(const std::string& line, std::string* error) {
  OperatorCall call;
  std::size_t pos = 0;
  const std::size_t n = line.size();
  auto skip_ws = [&] { while (pos < n && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos; };

  skip_ws();
  std::size_t name_start = pos;
  while (pos < n && is_ident_char(line[pos])) ++pos;
  if (pos == name_start) {
    if (error) *error = "operator line without a name: " + line;
    return std::nullopt;
  }
  call.name = line.substr(name_start, pos - name_start);

  while (true) {
    skip_ws();
    if (pos >= n) break;
    std::size_t key_start = pos;
    while (pos < n && is_ident_char(line[pos])) ++pos;
    if (pos == key_start || pos >= n || line[pos] != '=') {
      if (error) *error = "malformed parameter in operator line: " + line;
      return std::nullopt;
    }
    std::string key = line.substr(key_start, pos - key_start);
    ++pos;  // '='
    std::string value;
    if (pos < n && line[pos] == '"') {
      ++pos;
      std::size_t close = line.find('"', pos);
      if (close == std::string::npos) {
        if (error) *error = "unterminated quoted value in operator line: " + line;
        return std::nullopt;
      }
      value = line.substr(pos, close - pos);
      pos = close + 1;
    } else {
      std::size_t val_start = pos;
      while (pos < n && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      value = line.substr(val_start, pos - val_start);
    }
    call.params[key] = value;
  }
  return call;
}

}  // namespace

std::optional<Prediction> parse_prediction(const std::string& raw, std::string* error) {
  auto box = last_tag(raw, "box");
  if (!box) {
    if (error) *error = "no <box> tag in prediction response";
    return std::nullopt;
  }
  std::string payload = trim(*box);
  double value = 0.0;
  try {
    std::size_t consumed = 0;
    value = std::stod(payload, &consumed);
    if (consumed != payload.size()) {
      if (error) *error = "non-numeric <box> payload: " + payload;
      return std::nullopt;
    }
  } catch (const std::exception&) {
    if (error) *error = "non-numeric <box> payload: " + payload;
    return std::nullopt;
  }

  Prediction p;
  p.raw = raw;
  if (value < 0.0 || value > 1.0) {
    p.clamped = true;
    value = std::min(1.0, std::max(0.0, value));
  }
  p.value = value;
  if (auto reason = last_tag(raw, "reason")) p.reason = trim(*reason);
  return p;
}

std::optional<ParsedEdit> parse_workflow_edit(const std::string& raw, std::string* error) {
  ParsedEdit edit;

  auto body = first_tag(raw, "workflow");
  if (!body) {
    if (error) *error = "edit response is missing the <workflow> section";
    return std::nullopt;
  }
  edit.body = trim(*body) + "\n";

  if (auto modification = first_tag(raw, "modification")) {
    edit.delta = trim(*modification);
  }
  if (edit.delta.empty()) {
    edit.delta = "unspecified edit";
    edit.delta_defaulted = true;
  }

  if (auto operators = first_tag(raw, "operators")) {
    std::istringstream lines(*operators);
    std::string line;
    while (std::getline(lines, line)) {
      if (trim(line).empty()) continue;
      auto call = parse_operator_line(line, error);
      if (!call) return std::nullopt;
      edit.operators.push_back(std::move(*call));
    }
  }

  if (auto prompts = first_tag(raw, "prompts")) {
    const std::string& text = *prompts;
    std::size_t pos = 0;
    while (pos < text.size()) {
      while (pos < text.size() && !is_ident_char(text[pos])) ++pos;
      if (pos >= text.size()) break;
      std::size_t name_start = pos;
      while (pos < text.size() && is_ident_char(text[pos])) ++pos;
      std::string name = text.substr(name_start, pos - name_start);
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos >= text.size() || text[pos] != '=') {
        if (error) *error = "malformed prompt entry near '" + name + "'";
        return std::nullopt;
      }
      ++pos;
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
      if (text.compare(pos, 3, "\"\"\"") != 0) {
        if (error) *error = "prompt '" + name + "' is not triple-quoted";
        return std::nullopt;
      }
      pos += 3;
      std::size_t close = text.find("\"\"\"", pos);
      if (close == std::string::npos) {
        if (error) *error = "unterminated prompt '" + name + "'";
        return std::nullopt;
      }
      edit.prompts[name] = text.substr(pos, close - pos);
      pos = close + 3;
    }
  }

  return edit;
}

std::string render_workflow_edit(const ParsedEdit& edit) {
  std::ostringstream out;
  out << "<modification>" << edit.delta << "</modification>\n";
  out << "<operators>\n";
  for (const auto& call : edit.operators) {
    out << call.name;
    for (const auto& [key, value] : call.params) {
      out << " " << key << "=";
      const bool needs_quotes =
          value.empty() || value.find(' ') != std::string::npos;
      if (needs_quotes) {
        out << '"' << value << '"';
      } else {
        out << value;
      }
    }
    out << "\n";
  }
  out << "</operators>\n";
  out << "<prompts>\n";
  for (const auto& [name, text] : edit.prompts) {
    out << name << " = \"\"\"" << text << "\"\"\"\n";
  }
  out << "</prompts>\n";
  out << "<workflow>\n" << edit.body;
  if (!edit.body.empty() && edit.body.back() != '\n') out << "\n";
  out << "</workflow>\n";
  return out.str();
}

std::string render_prediction(double value, const std::string& reason) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return "<reason>" + reason + "</reason>\n<box>" + buf + "</box>\n";
}

}  // namespace flowsearch::opt
