// Small string helpers shared by the text parsers. Not installed.
#ifndef CAUSAL_BOOT_SRC_TEXT_HPP
#define CAUSAL_BOOT_SRC_TEXT_HPP

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace causal_boot::text {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = line.find(sep, start);
    out.push_back(line.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

// Whole-string numeric parse after trimming; nullopt on any leftover text.
template <typename T>
std::optional<T> to_number(std::string_view s) {
  s = trim(s);
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace causal_boot::text

#endif  // CAUSAL_BOOT_SRC_TEXT_HPP
