#include "uaradar/textdiff.hpp"

#include <algorithm>
#include <functional>
#include <span>
#include <unordered_map>

#include "uaradar/detail/sequence_diff.hpp"
#include "uaradar/text.hpp"

namespace uaradar {

std::u32string DiffScript::left_text() const {
  std::u32string out;
  for (const auto& h : hunks) {
    if (h.op != DiffOp::insert) out += h.text;
  }
  return out;
}

std::u32string DiffScript::right_text() const {
  std::u32string out;
  for (const auto& h : hunks) {
    if (h.op != DiffOp::remove) out += h.text;
  }
  return out;
}

std::size_t DiffScript::inserted() const {
  std::size_t n = 0;
  for (const auto& h : hunks) {
    if (h.op == DiffOp::insert) n += h.text.size();
  }
  return n;
}

std::size_t DiffScript::removed() const {
  std::size_t n = 0;
  for (const auto& h : hunks) {
    if (h.op == DiffOp::remove) n += h.text.size();
  }
  return n;
}

std::string extract_text(const DomTree& tree) {
  std::string joined;
  auto append = [&](const std::string& run) {
    if (run.empty()) return;
    if (!joined.empty()) joined.push_back(' ');
    joined += run;
  };
  std::function<void(int)> walk = [&](int id) {
    const DomNode& n = tree[id];
    if (n.tag == "script" || n.tag == "style") return;
    std::size_t run = 0;
    for (std::size_t c = 0; c <= n.children.size(); ++c) {
      while (run < n.text_runs.size() && n.text_runs[run].first <= c) {
        append(n.text_runs[run].second);
        ++run;
      }
      if (c < n.children.size()) walk(n.children[c]);
    }
    for (; run < n.text_runs.size(); ++run) append(n.text_runs[run].second);
  };
  if (tree.size() > 0) walk(tree.root);
  return collapse_whitespace(joined);
}

namespace {

using detail::Run;
using detail::SequenceDiff;

// Accumulates hunks, merging equal ops and folding each change block
// (everything between two equal hunks) into one removal then one insertion.
class HunkBuilder {
 public:
  void add(DiffOp op, std::u32string_view text) {
    if (text.empty()) return;
    if (op == DiffOp::equal) {
      flush_block();
      if (!hunks_.empty() && hunks_.back().op == DiffOp::equal) {
        hunks_.back().text += text;
      } else {
        hunks_.push_back({DiffOp::equal, std::u32string(text)});
      }
      return;
    }
    (op == DiffOp::remove ? removed_ : inserted_) += text;
  }

  DiffScript finish() {
    flush_block();
    return DiffScript{std::move(hunks_)};
  }

 private:
  void flush_block() {
    if (!removed_.empty()) hunks_.push_back({DiffOp::remove, std::move(removed_)});
    if (!inserted_.empty()) hunks_.push_back({DiffOp::insert, std::move(inserted_)});
    removed_.clear();
    inserted_.clear();
  }

  std::vector<Hunk> hunks_;
  std::u32string removed_;
  std::u32string inserted_;
};

void char_diff_into(std::u32string_view a, std::u32string_view b, HunkBuilder& out) {
  SequenceDiff<char32_t> sd(std::span<const char32_t>(a.data(), a.size()),
                            std::span<const char32_t>(b.data(), b.size()));
  for (const Run& r : sd.run()) {
    switch (r.op) {
      case DiffOp::equal:
      case DiffOp::remove: out.add(r.op, a.substr(r.a_pos, r.len)); break;
      case DiffOp::insert: out.add(r.op, b.substr(r.b_pos, r.len)); break;
    }
  }
}

std::vector<std::u32string_view> split_lines(std::u32string_view s) {
  std::vector<std::u32string_view> lines;
  std::size_t start = 0;
  while (start < s.size()) {
    auto nl = s.find(U'\n', start);
    std::size_t end = nl == std::u32string_view::npos ? s.size() : nl + 1;
    lines.push_back(s.substr(start, end - start));
    start = end;
  }
  return lines;
}

DiffScript line_prediff(std::u32string_view a, std::u32string_view b) {
  const auto la = split_lines(a);
  const auto lb = split_lines(b);
  std::unordered_map<std::u32string_view, int> ids;
  auto encode = [&](const std::vector<std::u32string_view>& lines) {
    std::vector<int> out;
    out.reserve(lines.size());
    for (auto l : lines) out.push_back(ids.emplace(l, static_cast<int>(ids.size())).first->second);
    return out;
  };
  const auto ia = encode(la);
  const auto ib = encode(lb);
  SequenceDiff<int> sd{std::span<const int>(ia), std::span<const int>(ib)};
  const auto runs = sd.run();

  HunkBuilder out;
  std::u32string pending_a, pending_b;
  auto refine = [&] {
    if (!pending_a.empty() || !pending_b.empty()) char_diff_into(pending_a, pending_b, out);
    pending_a.clear();
    pending_b.clear();
  };
  for (const Run& r : runs) {
    if (r.op == DiffOp::equal) {
      refine();
      for (std::size_t k = 0; k < r.len; ++k) out.add(DiffOp::equal, la[r.a_pos + k]);
    } else if (r.op == DiffOp::remove) {
      for (std::size_t k = 0; k < r.len; ++k) pending_a += la[r.a_pos + k];
    } else {
      for (std::size_t k = 0; k < r.len; ++k) pending_b += lb[r.b_pos + k];
    }
  }
  refine();
  return out.finish();
}

}  // namespace

DiffScript myers_diff(std::u32string_view a, std::u32string_view b) {
  if (std::min(a.size(), b.size()) > kLinePrediffThreshold) return line_prediff(a, b);
  HunkBuilder out;
  char_diff_into(a, b, out);
  return out.finish();
}

DiffScript myers_diff(std::string_view a_utf8, std::string_view b_utf8) {
  return myers_diff(utf8_decode(a_utf8), utf8_decode(b_utf8));
}

std::size_t hunk_levenshtein(const DiffScript& script) {
  std::size_t d = 0;
  std::size_t ins = 0;
  std::size_t del = 0;
  for (const auto& h : script.hunks) {
    switch (h.op) {
      case DiffOp::insert: ins += h.text.size(); break;
      case DiffOp::remove: del += h.text.size(); break;
      case DiffOp::equal:
        d += std::max(ins, del);
        ins = del = 0;
        break;
    }
  }
  return d + std::max(ins, del);
}

double normalized_content_similarity(std::size_t d, std::size_t len_left,
                                     std::size_t len_right) {
  if (len_left + len_right == 0) return 1.0;
  return 1.0 - 2.0 * static_cast<double>(d) /
                   static_cast<double>(len_left + len_right + d);
}

ContentScore content_similarity(std::string_view a_utf8, std::string_view b_utf8) {
  const std::u32string a = utf8_decode(a_utf8);
  const std::u32string b = utf8_decode(b_utf8);
  ContentScore s;
  s.len_left = a.size();
  s.len_right = b.size();
  // Diff in a canonical argument order; hunk_levenshtein is invariant under
  // swapping inserts and removals, so the score is exactly symmetric.
  const bool swap = b < a;
  s.d = hunk_levenshtein(swap ? myers_diff(b, a) : myers_diff(a, b));
  s.s2 = normalized_content_similarity(s.d, s.len_left, s.len_right);
  return s;
}

}  // namespace uaradar
