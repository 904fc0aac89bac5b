#include "uaradar/simhash.hpp"

#include <array>
#include <string>

#include "uaradar/text.hpp"

namespace uaradar {

namespace {
constexpr std::size_t kShingle = 4;
}

SimHash simhash64(std::string_view content) {
  const std::string norm = collapse_whitespace(content);
  if (norm.empty()) return {};
  std::array<std::int64_t, 64> votes{};
  auto vote = [&](std::string_view shingle) {
    const std::uint64_t h = stable_hash64(shingle);
    for (int b = 0; b < 64; ++b) votes[b] += ((h >> b) & 1U) ? 1 : -1;
  };
  if (norm.size() < kShingle) {
    vote(norm);
  } else {
    const std::string_view view(norm);
    for (std::size_t i = 0; i + kShingle <= view.size(); ++i) {
      vote(view.substr(i, kShingle));
    }
  }
  SimHash out;
  for (int b = 0; b < 64; ++b) {
    if (votes[b] > 0) out.bits |= (std::uint64_t{1} << b);
  }
  return out;
}

}  // namespace uaradar
