#include "racing/key_value.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace racing {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ParseError::ParseError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::vector<KeyValueEntry> parse_key_value_text(const std::string& text, const std::string& source) {
  std::vector<KeyValueEntry> out;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) throw ParseError(source, lineno, "malformed section header '" + line + "'");
      out.push_back({line, "", lineno});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, lineno, "expected 'name = value', got '" + line + "'");
    KeyValueEntry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
    if (e.key.empty()) throw ParseError(source, lineno, "empty key");
    if (e.value.empty()) throw ParseError(source, lineno, "empty value for '" + e.key + "'");
    out.push_back(std::move(e));
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<KeyValueEntry> parse_key_value_file(const std::string& path) {
  return parse_key_value_text(read_text_file(path), path);
}

double parse_double(const KeyValueEntry& e, const std::string& source) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
    throw ParseError(source, e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
  return v;
}

int parse_int(const KeyValueEntry& e, const std::string& source) {
  char* end = nullptr;
  const long v = std::strtol(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0')
    throw ParseError(source, e.line, "'" + e.key + "' expects an integer, got '" + e.value + "'");
  return static_cast<int>(v);
}

bool parse_bool(const KeyValueEntry& e, const std::string& source) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ParseError(source, e.line, "'" + e.key + "' expects true/false, got '" + e.value + "'");
}

}  // namespace racing
