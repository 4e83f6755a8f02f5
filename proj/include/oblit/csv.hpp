#pragma once

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

namespace oblit::csv {

inline std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

/// Non-finite values print as NA.
inline std::string number(double x) {
  if (!std::isfinite(x)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

class Writer {
 public:
  Writer(std::ostream& out, std::initializer_list<const char*> header) : out_(out) {
    bool first = true;
    for (const char* h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << '\n';
  }

  template <typename... Ts>
  void row(const Ts&... values) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(values), first = false), ...);
    out_ << '\n';
  }

 private:
  template <typename T>
  static std::string cell(const T& v) {
    if constexpr (std::is_same_v<T, bool>) {
      return v ? "1" : "0";
    } else if constexpr (std::is_floating_point_v<T>) {
      return number(static_cast<double>(v));
    } else if constexpr (std::is_integral_v<T>) {
      return std::to_string(v);
    } else {
      return field(std::string(v));
    }
  }

  std::ostream& out_;
};

}  // namespace oblit::csv
