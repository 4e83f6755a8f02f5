#pragma once

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <string>
#include <vector>

#include "oblit/error.hpp"

namespace oblit {

/// One "key = value" line. '#' starts a comment line; blank lines are skipped.
struct KeyValue {
  std::size_t line = 0;
  std::string key;
  std::string value;

  double as_real() const {
    const char* s = value.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s, &end);
    if (value.empty() || *end != '\0' || errno == ERANGE) throw ParseError(line, key, "expected a number, got \"" + value + "\"");
    return v;
  }

  std::uint64_t as_uint() const {
    if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError(line, key, "expected a non-negative integer, got \"" + value + "\"");
    }
    errno = 0;
    const unsigned long long v = std::strtoull(value.c_str(), nullptr, 10);
    if (errno == ERANGE) throw ParseError(line, key, "integer out of range");
    return v;
  }

  int as_int() const {
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (value.empty() || *end != '\0' || errno == ERANGE || v < std::numeric_limits<int>::min() ||
        v > std::numeric_limits<int>::max()) {
      throw ParseError(line, key, "expected an integer, got \"" + value + "\"");
    }
    return static_cast<int>(v);
  }

  bool as_bool() const {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ParseError(line, key, "expected true or false, got \"" + value + "\"");
  }

  std::vector<double> as_reals() const {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= value.size()) {
      const auto comma = value.find(',', start);
      KeyValue part{line, key, value.substr(start, comma == std::string::npos ? std::string::npos : comma - start)};
      const auto a = part.value.find_first_not_of(' ');
      const auto b = part.value.find_last_not_of(' ');
      part.value = a == std::string::npos ? "" : part.value.substr(a, b - a + 1);
      out.push_back(part.as_real());
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  }
};

inline std::vector<KeyValue> read_key_values(std::istream& in) {
  std::vector<KeyValue> out;
  std::string raw;
  std::size_t lineno = 0;
  auto trim = [](const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, trim(line), "expected key = value");
    KeyValue kv{lineno, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
    if (kv.key.empty()) throw ParseError(lineno, "", "empty key");
    out.push_back(std::move(kv));
  }
  return out;
}

inline std::vector<KeyValue> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  return read_key_values(in);
}

}  // namespace oblit
