#include <cctype>
#include <string>
#include <string_view>

#include "uaradar/asset_parsers.hpp"
#include "uaradar/text.hpp"

namespace uaradar {
namespace {

// Comments become a single space; string contents are kept verbatim.
std::string strip_comments(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const char c = in[i];
    if (c == '"' || c == '\'') {
      const std::size_t start = i++;
      while (i < in.size() && in[i] != c && in[i] != '\n') {
        if (in[i] == '\\' && i + 1 < in.size()) ++i;
        ++i;
      }
      if (i < in.size() && in[i] == c) ++i;
      out.append(in.substr(start, i - start));
    } else if (c == '/' && i + 1 < in.size() && in[i + 1] == '*') {
      const auto end = in.find("*/", i + 2);
      i = end == std::string_view::npos ? in.size() : end + 2;
      out.push_back(' ');
    } else {
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

bool is_name_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c >= 0x80 || c == '\\';
}

bool is_name_char(unsigned char c) {
  return is_name_start(c) || std::isdigit(c) || c == '-';
}

bool is_ident(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = 0;
  if (s[0] == '-') {
    if (s.size() == 1) return false;
    if (s[1] == '-') return true;
    i = 1;
  }
  if (!is_name_start(static_cast<unsigned char>(s[i]))) return false;
  for (++i; i < s.size(); ++i) {
    if (!is_name_char(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_ascii_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ascii_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string normalize_selectors(std::string_view prelude) {
  std::string out;
  int depth = 0;
  std::size_t start = 0;
  char quote = 0;
  auto flush = [&](std::size_t end) {
    std::string part = collapse_whitespace(prelude.substr(start, end - start));
    if (part.empty()) return;
    if (!out.empty()) out += ", ";
    out += part;
  };
  for (std::size_t i = 0; i < prelude.size(); ++i) {
    const char c = prelude[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '(' || c == '[') {
      ++depth;
    } else if ((c == ')' || c == ']') && depth > 0) {
      --depth;
    } else if (c == ',' && depth == 0) {
      flush(i);
      start = i + 1;
    }
  }
  flush(prelude.size());
  return out;
}

std::string normalize_value(std::string_view raw) {
  std::string v = collapse_whitespace(to_lower_ascii(raw));
  bool important = false;
  if (auto bang = v.rfind('!'); bang != std::string::npos) {
    std::string_view tail = trim(std::string_view(v).substr(bang + 1));
    if (tail == "important") {
      important = true;
      v = std::string(trim(std::string_view(v).substr(0, bang)));
    }
  }
  if (important) v += v.empty() ? "!important" : " !important";
  return v;
}

class CssReader {
 public:
  explicit CssReader(std::string src) : s_(std::move(src)) {}

  SyntaxTree run() {
    const int root = tree_.add(-1, "stylesheet", "");
    items(root, true);
    tree_.finalize();
    return std::move(tree_);
  }

 private:
  enum class Stop { eof, semicolon, open, close };

  bool eof() const { return i_ >= s_.size(); }

  void skip_ws() {
    while (!eof() && is_ascii_space(s_[i_])) ++i_;
  }

  // Advances to the first of the given stop characters outside strings,
  // parentheses and brackets, without consuming it.
  Stop scan(bool stop_semicolon, bool stop_close) {
    int depth = 0;
    while (!eof()) {
      const char c = s_[i_];
      if (c == '"' || c == '\'') {
        ++i_;
        while (!eof() && s_[i_] != c && s_[i_] != '\n') {
          if (s_[i_] == '\\') ++i_;
          ++i_;
        }
        if (!eof()) ++i_;
        continue;
      }
      if (c == '\\') {
        i_ += 2;
        continue;
      }
      if (c == '(' || c == '[') {
        ++depth;
      } else if ((c == ')' || c == ']') && depth > 0) {
        --depth;
      } else if (depth == 0) {
        if (c == '{') return Stop::open;
        if (c == ';' && stop_semicolon) return Stop::semicolon;
        if (c == '}' && stop_close) return Stop::close;
      }
      ++i_;
    }
    i_ = s_.size();
    return Stop::eof;
  }

  void items(int parent, bool top_level) {
    while (true) {
      skip_ws();
      if (eof()) return;
      const char c = s_[i_];
      if (c == '}') {
        ++i_;
        if (!top_level) return;
        continue;
      }
      if (c == ';') {
        ++i_;
        continue;
      }
      if (c == '@') {
        at_rule(parent, top_level);
        continue;
      }
      const std::size_t start = i_;
      const Stop stop = scan(!top_level, !top_level);
      const std::string_view text = std::string_view(s_).substr(start, i_ - start);
      if (stop == Stop::open) {
        ++i_;
        const int rule = tree_.add(parent, "rule", normalize_selectors(text));
        items(rule, false);
      } else if (!top_level) {
        declaration(parent, text);
        if (stop == Stop::semicolon) ++i_;
      }
    }
  }

  void at_rule(int parent, bool top_level) {
    const std::size_t name_start = ++i_;
    while (!eof() && is_name_char(static_cast<unsigned char>(s_[i_]))) ++i_;
    std::string label = "@" + to_lower_ascii(std::string_view(s_).substr(name_start, i_ - name_start));
    const std::size_t prelude_start = i_;
    const Stop stop = scan(true, !top_level);
    const std::string prelude = collapse_whitespace(std::string_view(s_).substr(prelude_start, i_ - prelude_start));
    if (!prelude.empty()) label += " " + prelude;
    const int node = tree_.add(parent, "atrule", std::move(label));
    if (stop == Stop::open) {
      ++i_;
      items(node, false);
    } else if (stop == Stop::semicolon) {
      ++i_;
    }
  }

  void declaration(int parent, std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) return;
    const std::string_view name = trim(text.substr(0, colon));
    if (!is_ident(name)) return;
    std::string label = to_lower_ascii(name);
    label += ": ";
    label += normalize_value(text.substr(colon + 1));
    tree_.add(parent, "decl", std::move(label));
  }

  std::string s_;
  std::size_t i_ = 0;
  SyntaxTree tree_;
};

}  // namespace

SyntaxTree parse_css(std::string_view css) {
  return CssReader(strip_comments(css)).run();
}

}  // namespace uaradar
