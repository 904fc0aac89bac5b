#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "uaradar/textdiff.hpp"

namespace uaradar::detail {

// Run of one diff op over two sequences. Positions index the sequence the op
// consumes (a for equal/remove, b for equal/insert).
struct Run {
  DiffOp op;
  std::size_t a_pos;  // start in a (equal/remove)
  std::size_t b_pos;  // start in b (equal/insert)
  std::size_t len;
};

template <typename T>
class SequenceDiff {
 public:
  SequenceDiff(std::span<const T> a, std::span<const T> b) : a_(a), b_(b) {}

  std::vector<Run> run() {
    diff(0, a_.size(), 0, b_.size());
    return std::move(runs_);
  }

 private:
  void emit(DiffOp op, std::size_t a_pos, std::size_t b_pos, std::size_t len) {
    if (len == 0) return;
    if (!runs_.empty() && runs_.back().op == op) {
      runs_.back().len += len;
      return;
    }
    runs_.push_back({op, a_pos, b_pos, len});
  }

  // Diffs a_[a0, a1) against b_[b0, b1).
  void diff(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
    std::size_t prefix = 0;
    while (a0 + prefix < a1 && b0 + prefix < b1 && a_[a0 + prefix] == b_[b0 + prefix]) ++prefix;
    std::size_t suffix = 0;
    while (a1 - suffix > a0 + prefix && b1 - suffix > b0 + prefix &&
           a_[a1 - suffix - 1] == b_[b1 - suffix - 1]) {
      ++suffix;
    }
    emit(DiffOp::equal, a0, b0, prefix);
    middle(a0 + prefix, a1 - suffix, b0 + prefix, b1 - suffix);
    emit(DiffOp::equal, a1 - suffix, b1 - suffix, suffix);
  }

  void middle(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
    const std::size_t n = a1 - a0;
    const std::size_t m = b1 - b0;
    if (n == 0) {
      emit(DiffOp::insert, a0, b0, m);
      return;
    }
    if (m == 0) {
      emit(DiffOp::remove, a0, b0, n);
      return;
    }
    // Shorter side contained in the longer one: insertions (or deletions)
    // around a single equal block are optimal.
    if (auto hit = contains(n >= m, a0, a1, b0, b1)) {
      const std::size_t off = *hit;
      if (n >= m) {
        emit(DiffOp::remove, a0, b0, off);
        emit(DiffOp::equal, a0 + off, b0, m);
        emit(DiffOp::remove, a0 + off + m, b1, n - off - m);
      } else {
        emit(DiffOp::insert, a0, b0, off);
        emit(DiffOp::equal, a0, b0 + off, n);
        emit(DiffOp::insert, a1, b0 + off + n, m - off - n);
      }
      return;
    }
    if (n == 1 || m == 1) {
      // No common element (containment failed): replace wholesale.
      emit(DiffOp::remove, a0, b0, n);
      emit(DiffOp::insert, a1, b0, m);
      return;
    }
    bisect(a0, a1, b0, b1);
  }

  std::optional<std::size_t> contains(bool a_longer, std::size_t a0, std::size_t a1,
                                      std::size_t b0, std::size_t b1) const {
    auto longer = a_longer ? a_.subspan(a0, a1 - a0) : b_.subspan(b0, b1 - b0);
    auto shorter = a_longer ? b_.subspan(b0, b1 - b0) : a_.subspan(a0, a1 - a0);
    if (shorter.size() > longer.size()) return std::nullopt;
    auto it = std::search(longer.begin(), longer.end(), shorter.begin(), shorter.end());
    if (it == longer.end()) return std::nullopt;
    return static_cast<std::size_t>(it - longer.begin());
  }

  // Linear-space middle-snake search; recurses on both halves.
  void bisect(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
    const long n = static_cast<long>(a1 - a0);
    const long m = static_cast<long>(b1 - b0);
    const long max_d = (n + m + 1) / 2;
    const long v_offset = max_d;
    const long v_length = 2 * max_d;
    std::vector<long> v1(static_cast<std::size_t>(v_length), -1);
    std::vector<long> v2(static_cast<std::size_t>(v_length), -1);
    v1[static_cast<std::size_t>(v_offset + 1)] = 0;
    v2[static_cast<std::size_t>(v_offset + 1)] = 0;
    const long delta = n - m;
    const bool front = (delta % 2) != 0;
    long k1start = 0, k1end = 0, k2start = 0, k2end = 0;
    auto A = [&](long i) { return a_[a0 + static_cast<std::size_t>(i)]; };
    auto B = [&](long j) { return b_[b0 + static_cast<std::size_t>(j)]; };
    for (long d = 0; d < max_d; ++d) {
      for (long k1 = -d + k1start; k1 <= d - k1end; k1 += 2) {
        const long k1_offset = v_offset + k1;
        long x1;
        if (k1 == -d || (k1 != d && v1[static_cast<std::size_t>(k1_offset - 1)] <
                                        v1[static_cast<std::size_t>(k1_offset + 1)])) {
          x1 = v1[static_cast<std::size_t>(k1_offset + 1)];
        } else {
          x1 = v1[static_cast<std::size_t>(k1_offset - 1)] + 1;
        }
        long y1 = x1 - k1;
        while (x1 < n && y1 < m && A(x1) == B(y1)) {
          ++x1;
          ++y1;
        }
        v1[static_cast<std::size_t>(k1_offset)] = x1;
        if (x1 > n) {
          k1end += 2;
        } else if (y1 > m) {
          k1start += 2;
        } else if (front) {
          const long k2_offset = v_offset + delta - k1;
          if (k2_offset >= 0 && k2_offset < v_length && v2[static_cast<std::size_t>(k2_offset)] != -1) {
            const long x2 = n - v2[static_cast<std::size_t>(k2_offset)];
            if (x1 >= x2) {
              split(a0, a1, b0, b1, x1, y1);
              return;
            }
          }
        }
      }
      for (long k2 = -d + k2start; k2 <= d - k2end; k2 += 2) {
        const long k2_offset = v_offset + k2;
        long x2;
        if (k2 == -d || (k2 != d && v2[static_cast<std::size_t>(k2_offset - 1)] <
                                        v2[static_cast<std::size_t>(k2_offset + 1)])) {
          x2 = v2[static_cast<std::size_t>(k2_offset + 1)];
        } else {
          x2 = v2[static_cast<std::size_t>(k2_offset - 1)] + 1;
        }
        long y2 = x2 - k2;
        while (x2 < n && y2 < m && A(n - x2 - 1) == B(m - y2 - 1)) {
          ++x2;
          ++y2;
        }
        v2[static_cast<std::size_t>(k2_offset)] = x2;
        if (x2 > n) {
          k2end += 2;
        } else if (y2 > m) {
          k2start += 2;
        } else if (!front) {
          const long k1_offset = v_offset + delta - k2;
          if (k1_offset >= 0 && k1_offset < v_length && v1[static_cast<std::size_t>(k1_offset)] != -1) {
            const long x1 = v1[static_cast<std::size_t>(k1_offset)];
            const long y1 = v_offset + x1 - k1_offset;
            if (x1 >= n - x2) {
              split(a0, a1, b0, b1, x1, y1);
              return;
            }
          }
        }
      }
    }
    emit(DiffOp::remove, a0, b0, static_cast<std::size_t>(n));
    emit(DiffOp::insert, a1, b0, static_cast<std::size_t>(m));
  }

  void split(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1, long x, long y) {
    const std::size_t ax = a0 + static_cast<std::size_t>(x);
    const std::size_t by = b0 + static_cast<std::size_t>(y);
    diff(a0, ax, b0, by);
    diff(ax, a1, by, b1);
  }

  std::span<const T> a_;
  std::span<const T> b_;
  std::vector<Run> runs_;
};

}  // namespace uaradar::detail
