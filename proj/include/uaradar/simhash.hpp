#pragma once

#include <bit>
#include <cstdint>
#include <string_view>

namespace uaradar {

struct SimHash {
  std::uint64_t bits = 0;
  friend bool operator==(SimHash, SimHash) = default;
};

inline int hamming_distance(SimHash a, SimHash b) noexcept {
  return std::popcount(a.bits ^ b.bits);
}

// 64-bit simhash over 4-byte shingles of whitespace-normalized content.
// Inputs shorter than one shingle hash as a single shingle; empty input
// yields 0.
SimHash simhash64(std::string_view content);

}  // namespace uaradar
