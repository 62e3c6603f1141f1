#pragma once

// Flat `name = value` text files shared by the vehicle, tire and controller
// configuration. Blank lines and `#` comments are ignored.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace racing {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct KeyValueEntry {
  std::string key;
  std::string value;
  int line = 0;
};

// Splits a text into ordered entries. Section headers of the form `[name]`
// are returned as entries with key "[name]" and an empty value so callers can
// implement repeated blocks.
std::vector<KeyValueEntry> parse_key_value_text(const std::string& text, const std::string& source);
std::vector<KeyValueEntry> parse_key_value_file(const std::string& path);

double parse_double(const KeyValueEntry& e, const std::string& source);
int parse_int(const KeyValueEntry& e, const std::string& source);
bool parse_bool(const KeyValueEntry& e, const std::string& source);

std::string read_text_file(const std::string& path);

}  // namespace racing
