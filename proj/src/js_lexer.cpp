#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uaradar/asset_parsers.hpp"
#include "uaradar/text.hpp"

namespace uaradar {
namespace {

constexpr std::array<std::string_view, 46> kKeywords = {
    "await",  "break",   "case",     "catch",  "class",      "const",  "continue",
    "debugger", "default", "delete", "do",     "else",       "enum",   "export",
    "extends", "false",  "finally",  "for",    "function",   "if",     "import",
    "in",     "instanceof", "new",   "null",   "return",     "super",  "switch",
    "this",   "throw",   "true",     "try",    "typeof",     "var",    "void",
    "while",  "with",    "yield",    "let",    "static",     "implements", "interface",
    "package", "private", "protected", "public"};

// Keywords after which a slash starts a regular expression.
constexpr std::array<std::string_view, 16> kRegexAfter = {
    "return", "typeof", "instanceof", "in", "of", "new", "delete", "void",
    "throw", "case", "do", "else", "yield", "await", "extends", "export"};

// Longest first within each length class.
constexpr std::array<std::string_view, 53> kPunctuators = {
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "?\?=",
    "=>", "==", "!=", "<=", ">=", "&&", "||", "??", "?.", "++", "--", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "**",
    "{", "}", "(", ")", "[", "]", ";", ",", "<", ">", "+", "-", "*", "/", "%",
    "&", "|", "^", "!", "~"};
constexpr std::string_view kSinglePunct = "?:=.@#";

bool contains(auto const& list, std::string_view w) {
  return std::find(list.begin(), list.end(), w) != list.end();
}

bool ident_start(unsigned char c) {
  return std::isalpha(c) || c == '$' || c == '_' || c == '\\' || c >= 0x80;
}

bool ident_part(unsigned char c) { return ident_start(c) || std::isdigit(c); }

struct Token {
  std::string kind;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  SyntaxTree run() {
    stack_.push_back({tree_.add(-1, "program", ""), 0, -1});
    while (next()) {}
    flush_pending();
    tree_.finalize();
    return std::move(tree_);
  }

 private:
  struct Group {
    int node;
    char close;
    int opener_prev;  // index into history_ of the token before the opener
  };

  bool eof() const { return i_ >= s_.size(); }
  char peek(std::size_t k = 0) const { return i_ + k < s_.size() ? s_[i_ + k] : '\0'; }

  bool skip_trivia() {
    while (!eof()) {
      const unsigned char c = static_cast<unsigned char>(s_[i_]);
      if (std::isspace(c)) {
        ++i_;
      } else if (c == 0xC2 && peek(1) == static_cast<char>(0xA0)) {
        i_ += 2;
      } else if (c == 0xEF && peek(1) == static_cast<char>(0xBB) && peek(2) == static_cast<char>(0xBF)) {
        i_ += 3;
      } else if (c == '/' && peek(1) == '/') {
        while (!eof() && s_[i_] != '\n' && s_[i_] != '\r') ++i_;
      } else if (c == '/' && peek(1) == '*') {
        const auto end = s_.find("*/", i_ + 2);
        i_ = end == std::string_view::npos ? s_.size() : end + 2;
      } else {
        return true;
      }
    }
    return false;
  }

  bool regex_allowed() const {
    if (history_.empty()) return true;
    const Token& t = history_.back();
    if (t.kind == "num" || t.kind == "str" || t.kind == "regex" || t.kind == "template") return false;
    if (t.kind == "ident") return false;
    if (t.kind == "keyword") return contains(kRegexAfter, t.text);
    if (t.text == "]") return false;
    if (t.text == ")") {
      // `if (...) /re/` and friends.
      const int before = last_closed_prev_;
      if (before >= 0) {
        const Token& k = history_[static_cast<std::size_t>(before)];
        return k.kind == "keyword" && (k.text == "if" || k.text == "while" || k.text == "for" || k.text == "with");
      }
      return false;
    }
    if (t.text == "}") return true;
    return true;
  }

  void read_string(char quote) {
    ++i_;
    while (!eof() && s_[i_] != quote) {
      if (s_[i_] == '\\') ++i_;
      else if (s_[i_] == '\n') break;
      ++i_;
    }
    if (!eof() && s_[i_] == quote) ++i_;
  }

  void read_number() {
    if (peek() == '0' && std::strchr("xXoObB", peek(1)) && peek(1) != '\0') {
      i_ += 2;
      while (!eof() && (std::isxdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    } else {
      while (!eof() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
      if (peek() == '.') {
        ++i_;
        while (!eof() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
      }
      if (peek() == 'e' || peek() == 'E') {
        const std::size_t k = (peek(1) == '+' || peek(1) == '-') ? 2 : 1;
        if (std::isdigit(static_cast<unsigned char>(peek(k)))) {
          i_ += k;
          while (!eof() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        }
      }
    }
    if (peek() == 'n') ++i_;
  }

  void read_regex() {
    ++i_;
    bool in_class = false;
    while (!eof()) {
      const char c = s_[i_];
      if (c == '\\') {
        i_ += 2;
        continue;
      }
      if (c == '\n') break;
      if (c == '[') in_class = true;
      else if (c == ']') in_class = false;
      else if (c == '/' && !in_class) {
        ++i_;
        break;
      }
      ++i_;
    }
    while (!eof() && ident_part(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  // Reads template characters up to and including "`" or "${".
  void read_template_chunk() {
    while (!eof()) {
      const char c = s_[i_];
      if (c == '\\') {
        i_ += 2;
        continue;
      }
      if (c == '`') {
        ++i_;
        return;
      }
      if (c == '$' && peek(1) == '{') {
        i_ += 2;
        template_depth_.push_back(static_cast<int>(stack_.size()));
        return;
      }
      ++i_;
    }
    i_ = s_.size();
  }

  // Chunks open with "`" or "}" and close with "`" or "${".
  std::string template_label(std::string_view raw) const {
    if (!raw.empty()) raw.remove_prefix(1);
    if (raw.ends_with("${")) {
      raw.remove_suffix(2);
    } else if (raw.ends_with('`')) {
      raw.remove_suffix(1);
    }
    if (raw.size() > kMaxLiteralLabel) return "str#" + hex64(stable_hash64(raw));
    return std::string(raw);
  }

  std::string literal_label(std::string_view raw) const {
    if (raw.size() >= 2) raw = raw.substr(1, raw.size() - 2);
    if (raw.size() > kMaxLiteralLabel) return "str#" + hex64(stable_hash64(raw));
    return std::string(raw);
  }

  // An identifier is held back one token so that a following "(" can adopt
  // it as the callee of a call group.
  void leaf(std::string kind, std::string text) {
    flush_pending();
    if (kind == "ident") {
      pending_ident_ = text;
    } else {
      tree_.add(stack_.back().node, kind, text);
    }
    history_.push_back({std::move(kind), std::move(text)});
  }

  void flush_pending() {
    if (!pending_ident_) return;
    tree_.add(stack_.back().node, "ident", std::move(*pending_ident_));
    pending_ident_.reset();
  }

  void open(char c) {
    const char close = c == '(' ? ')' : c == '[' ? ']' : '}';
    const int parent = stack_.back().node;
    const int prev = static_cast<int>(history_.size()) - 1;
    int group;
    if (c == '(' && pending_ident_) {
      group = tree_.add(parent, "call", *pending_ident_);
      tree_.add(group, "ident", std::move(*pending_ident_));
      pending_ident_.reset();
    } else {
      flush_pending();
      group = tree_.add(parent, c == '(' ? "paren" : c == '[' ? "bracket" : "brace", "");
    }
    tree_.add(group, "punct", std::string(1, c));
    history_.push_back({"punct", std::string(1, c)});
    stack_.push_back({group, close, prev});
  }

  void close(char c) {
    flush_pending();
    // Close the innermost matching group; unmatched closers stay leaves.
    auto it = std::find_if(stack_.rbegin(), stack_.rend() - 1, [&](const Group& g) { return g.close == c; });
    if (it == stack_.rend() - 1) {
      leaf("punct", std::string(1, c));
      return;
    }
    const auto keep = static_cast<std::size_t>(stack_.rend() - it);
    stack_.resize(keep);
    tree_.add(stack_.back().node, "punct", std::string(1, c));
    last_closed_prev_ = stack_.back().opener_prev;
    history_.push_back({"punct", std::string(1, c)});
    stack_.pop_back();
  }

  bool next() {
    if (!skip_trivia()) return false;
    const std::size_t start = i_;
    const unsigned char c = static_cast<unsigned char>(s_[i_]);
    const auto text = [&] { return std::string(s_.substr(start, i_ - start)); };

    if (ident_start(c)) {
      while (!eof()) {
        const unsigned char d = static_cast<unsigned char>(s_[i_]);
        if (d == '\\') i_ += 2;
        else if (d == 0xC2 && peek(1) == static_cast<char>(0xA0)) break;
        else if (ident_part(d)) ++i_;
        else break;
      }
      std::string word = text();
      const bool keyword = contains(kKeywords, word);
      leaf(keyword ? "keyword" : "ident", std::move(word));
      return true;
    }
    if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      read_number();
      leaf("num", text());
      return true;
    }
    if (c == '"' || c == '\'') {
      read_string(static_cast<char>(c));
      leaf("str", literal_label(s_.substr(start, i_ - start)));
      return true;
    }
    if (c == '`') {
      ++i_;
      read_template_chunk();
      leaf("template", template_label(s_.substr(start, i_ - start)));
      return true;
    }
    if (c == '}' && !template_depth_.empty() && template_depth_.back() == static_cast<int>(stack_.size())) {
      template_depth_.pop_back();
      ++i_;
      read_template_chunk();
      leaf("template", template_label(s_.substr(start, i_ - start)));
      return true;
    }
    if (c == '/' && regex_allowed()) {
      read_regex();
      leaf("regex", text());
      return true;
    }
    if (c == '(' || c == '[' || c == '{') {
      ++i_;
      open(static_cast<char>(c));
      return true;
    }
    if (c == ')' || c == ']' || c == '}') {
      ++i_;
      close(static_cast<char>(c));
      return true;
    }
    for (std::string_view p : kPunctuators) {
      if (s_.substr(i_, p.size()) == p) {
        if (p == "?." && std::isdigit(static_cast<unsigned char>(peek(2)))) continue;
        i_ += p.size();
        leaf("punct", std::string(p));
        return true;
      }
    }
    ++i_;
    if (kSinglePunct.find(static_cast<char>(c)) != std::string_view::npos) {
      leaf("punct", text());
    }
    // Anything else is not a token and is skipped.
    return true;
  }

  std::string_view s_;
  std::size_t i_ = 0;
  SyntaxTree tree_;
  std::vector<Group> stack_;
  std::vector<Token> history_;
  std::vector<int> template_depth_;
  int last_closed_prev_ = -1;
  std::optional<std::string> pending_ident_;
};

}  // namespace

SyntaxTree parse_js_lexical(std::string_view js) { return Lexer(js).run(); }

}  // namespace uaradar
