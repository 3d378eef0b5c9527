#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace t2ot {

// splitmix64. Every stochastic draw in the project is keyed by a seed
// derived through this mixer, so scheduling order can never change results.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + splitmix64(b)));
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c, std::uint64_t d) {
  return mix_seed(mix_seed(a, b, c), d);
}

// FNV-1a over bytes; used for config snapshot hashes.
std::uint64_t fnv1a64(const std::string& bytes);
std::string to_hex(std::uint64_t value);

// ---- string helpers ------------------------------------------------------

std::string trim(const std::string& s);
std::string to_lower(const std::string& s);
std::vector<std::string> split_lines(const std::string& text);
// Splits on runs of blank lines; each block is trimmed of trailing newlines.
std::vector<std::string> split_blank_separated(const std::string& text);

// Token-count fallback when a backend reports no usage: ceil(chars / 4).
long long estimate_tokens(const std::string& text);

// Renders a token count in the report style, e.g. 5500 -> "5.5k".
std::string format_kilo(double tokens);

std::string format_fixed(double value, int decimals);

}  // namespace t2ot
