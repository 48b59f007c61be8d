#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <string>
#include <system_error>
#include <type_traits>
#include <vector>

#include "echosim/error.hpp"

namespace echosim {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& text, const std::string& what) {
  const auto s = trim(text);
  T value{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  std::from_chars_result res;
  if constexpr (std::is_floating_point_v<T>) {
    res = std::from_chars(first, last, value, std::chars_format::general);
  } else {
    res = std::from_chars(first, last, value);
  }
  if (s.empty() || res.ec != std::errc() || res.ptr != last) {
    throw ConfigError(what + ": '" + text + "' is not a valid number");
  }
  return value;
}

inline bool parse_bool(const std::string& text, const std::string& what) {
  const auto s = trim(text);
  if (s == "true" || s == "on" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "off" || s == "0" || s == "no") return false;
  throw ConfigError(what + ": '" + text + "' is not a boolean");
}

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

// "key = value" lines; blank lines and '#' comments are skipped.
inline std::vector<KeyValue> parse_key_values(std::istream& is, const std::string& source) {
  std::vector<KeyValue> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    out.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no});
  }
  return out;
}

}  // namespace echosim
