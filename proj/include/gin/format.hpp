#pragma once

#include <charconv>
#include <string>

namespace gin {

// Locale-independent decimal text, 9 significant digits.
inline std::string format_g9(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  return std::string(buf, r.ptr);
}

// Shortest representation that round-trips to the same double.
inline std::string format_roundtrip(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s, bool& ok) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  ok = (r.ec == std::errc{} && r.ptr == s.data() + s.size());
  return v;
}

}  // namespace gin
