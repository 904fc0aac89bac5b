#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace uaradar {

inline bool is_ascii_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Collapses runs of ASCII whitespace to a single space and trims both ends.
std::string collapse_whitespace(std::string_view in);

std::string to_lower_ascii(std::string_view in);

// Lossy UTF-8 decode: invalid sequences become U+FFFD.
std::u32string utf8_decode(std::string_view in);
std::string utf8_encode(std::u32string_view in);
void utf8_append(std::string& out, char32_t cp);

// Number of code points after lossy decoding.
std::size_t utf8_length(std::string_view in);

std::string sha256_hex(std::string_view bytes);

// 64-bit FNV-1a followed by a splitmix64 finalizer; used wherever a fast,
// well-mixed, stable hash is needed (shingles, subtree hashes).
std::uint64_t stable_hash64(std::string_view bytes) noexcept;
std::uint64_t mix64(std::uint64_t x) noexcept;

std::string hex64(std::uint64_t v);

}  // namespace uaradar
