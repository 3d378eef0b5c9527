#include "t2ot/util.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace t2ot {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return std::string(buf);
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string to_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  if (!current.empty()) lines.push_back(current);
  return lines;
}

std::vector<std::string> split_blank_separated(const std::string& text) {
  std::vector<std::string> blocks;
  std::string current;
  bool current_has_text = false;
  auto flush = [&]() {
    if (current_has_text) {
      while (!current.empty() && current.back() == '\n') current.pop_back();
      blocks.push_back(current);
    }
    current.clear();
    current_has_text = false;
  };
  for (const std::string& line : split_lines(text)) {
    if (trim(line).empty()) {
      flush();
    } else {
      current += line;
      current += '\n';
      current_has_text = true;
    }
  }
  flush();
  return blocks;
}

long long estimate_tokens(const std::string& text) {
  return static_cast<long long>((text.size() + 3) / 4);
}

std::string format_kilo(double tokens) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1fk", tokens / 1000.0);
  return std::string(buf);
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return std::string(buf);
}

}  // namespace t2ot
