#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "uaradar/dom.hpp"

namespace uaradar {

enum class DiffOp { equal, insert, remove };

struct Hunk {
  DiffOp op = DiffOp::equal;
  std::u32string text;

  friend bool operator==(const Hunk&, const Hunk&) = default;
};

// Adjacent hunks never share an op. Equal + remove hunks spell the left
// text; equal + insert hunks spell the right text.
struct DiffScript {
  std::vector<Hunk> hunks;

  std::u32string left_text() const;
  std::u32string right_text() const;
  std::size_t inserted() const;
  std::size_t removed() const;
};

// Visible text in document order, skipping script and style elements, with
// whitespace collapsed.
std::string extract_text(const DomTree& tree);

// Inputs above this many code points (on both sides) are diffed line by line
// first, then each changed line block is refined character by character.
inline constexpr std::size_t kLinePrediffThreshold = 10'000;

// Character-level (code point) minimal insert/delete script.
DiffScript myers_diff(std::u32string_view a, std::u32string_view b);
DiffScript myers_diff(std::string_view a_utf8, std::string_view b_utf8);

// Levenshtein estimate from a script: pending inserts and deletes between
// equal hunks cost max(inserts, deletes).
std::size_t hunk_levenshtein(const DiffScript& script);

struct ContentScore {
  std::size_t d = 0;
  std::size_t len_left = 0;
  std::size_t len_right = 0;
  double s2 = 1.0;
};

// s2 = 1 - 2d / (len_left + len_right + d); 1.0 when both are empty.
double normalized_content_similarity(std::size_t d, std::size_t len_left,
                                     std::size_t len_right);

ContentScore content_similarity(std::string_view a_utf8, std::string_view b_utf8);

}  // namespace uaradar
