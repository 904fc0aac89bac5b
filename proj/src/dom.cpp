#include "uaradar/dom.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <functional>
#include <set>
#include <unordered_map>

#include "uaradar/error.hpp"
#include "uaradar/text.hpp"

namespace uaradar {

namespace {

constexpr std::size_t kMaxTextTokens = 512;

bool in_list(std::string_view tag, std::initializer_list<std::string_view> list) {
  return std::find(list.begin(), list.end(), tag) != list.end();
}

bool is_void(std::string_view tag) {
  return in_list(tag, {"area", "base", "br", "col", "embed", "hr", "img", "input",
                       "link", "meta", "param", "source", "track", "wbr",
                       "keygen", "basefont", "bgsound", "frame"});
}

bool is_rcdata(std::string_view tag) { return in_list(tag, {"textarea", "title"}); }

bool closes_paragraph(std::string_view tag) {
  return in_list(tag, {"address", "article", "aside", "blockquote", "center", "details",
                       "dialog", "dir", "div", "dl", "fieldset", "figcaption", "figure",
                       "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header",
                       "hgroup", "hr", "main", "menu", "nav", "ol", "p", "pre",
                       "section", "summary", "table", "ul", "li", "dd", "dt",
                       "listing", "plaintext", "xmp", "search"});
}

bool is_heading(std::string_view tag) {
  return tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6';
}

bool is_scope_boundary(std::string_view tag) {
  return in_list(tag, {"applet", "caption", "html", "table", "td", "th", "marquee",
                       "object", "template", "button"});
}

bool is_name_char(char c) {
  return !is_ascii_space(c) && c != '/' && c != '>' && c != '\0';
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

struct NamedEntity {
  const char* name;
  char32_t cp;
};

constexpr std::array<NamedEntity, 44> kEntities{{
    {"amp", '&'},       {"lt", '<'},         {"gt", '>'},         {"quot", '"'},
    {"apos", '\''},     {"nbsp", 0xA0},      {"copy", 0xA9},      {"reg", 0xAE},
    {"trade", 0x2122},  {"hellip", 0x2026},  {"mdash", 0x2014},   {"ndash", 0x2013},
    {"lsquo", 0x2018},  {"rsquo", 0x2019},   {"ldquo", 0x201C},   {"rdquo", 0x201D},
    {"bull", 0x2022},   {"middot", 0xB7},    {"laquo", 0xAB},     {"raquo", 0xBB},
    {"euro", 0x20AC},   {"pound", 0xA3},     {"yen", 0xA5},       {"cent", 0xA2},
    {"sect", 0xA7},     {"deg", 0xB0},       {"para", 0xB6},      {"times", 0xD7},
    {"divide", 0xF7},   {"plusmn", 0xB1},    {"frac12", 0xBD},    {"frac14", 0xBC},
    {"frac34", 0xBE},   {"iexcl", 0xA1},     {"iquest", 0xBF},    {"shy", 0xAD},
    {"larr", 0x2190},   {"rarr", 0x2192},    {"uarr", 0x2191},    {"darr", 0x2193},
    {"eacute", 0xE9},   {"egrave", 0xE8},    {"aacute", 0xE1},    {"ouml", 0xF6},
}};

// Decodes character references. Named references need a terminating ';'.
std::string decode_entities(std::string_view in) {
  if (in.find('&') == std::string_view::npos) return std::string(in);
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    char c = in[i];
    if (c != '&') {
      out.push_back(c);
      ++i;
      continue;
    }
    if (i + 1 < in.size() && in[i + 1] == '#') {
      std::size_t j = i + 2;
      bool hex = j < in.size() && (in[j] == 'x' || in[j] == 'X');
      if (hex) ++j;
      std::size_t start = j;
      char32_t cp = 0;
      while (j < in.size() && (hex ? std::isxdigit(static_cast<unsigned char>(in[j]))
                                   : std::isdigit(static_cast<unsigned char>(in[j])))) {
        char d = in[j];
        unsigned v = (d >= '0' && d <= '9') ? static_cast<unsigned>(d - '0')
                   : static_cast<unsigned>((d | 0x20) - 'a' + 10);
        if (cp < 0x110000) cp = cp * (hex ? 16 : 10) + v;
        ++j;
      }
      if (j > start) {
        if (j < in.size() && in[j] == ';') ++j;
        if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
        utf8_append(out, cp);
        i = j;
        continue;
      }
      out.push_back('&');
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < in.size() && j - i <= 10 && std::isalnum(static_cast<unsigned char>(in[j]))) ++j;
    if (j < in.size() && in[j] == ';' && j > i + 1) {
      std::string_view name = in.substr(i + 1, j - i - 1);
      auto it = std::find_if(kEntities.begin(), kEntities.end(),
                             [&](const NamedEntity& e) { return name == e.name; });
      if (it != kEntities.end()) {
        utf8_append(out, it->cp);
        i = j + 1;
        continue;
      }
    }
    out.push_back('&');
    ++i;
  }
  return out;
}

bool is_token_char(unsigned char c) {
  return std::isalnum(c) || c == '-' || c == '_' || c >= 0x80;
}

void tokenize_into(std::string_view s, const std::string& prefix,
                   std::vector<std::string>& out, std::size_t limit) {
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < s.size() && count < limit) {
    while (i < s.size() && !is_token_char(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && is_token_char(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) {
      out.push_back(prefix + to_lower_ascii(s.substr(i, j - i)));
      ++count;
    }
    i = j;
  }
}

void build_signature(DomNode& n) {
  n.signature_tokens.clear();
  n.signature_tokens.push_back("t:" + n.tag);
  for (const auto& [k, v] : n.attrs) {
    n.signature_tokens.push_back("k:" + k);
    tokenize_into(v, "v:" + k + "=", n.signature_tokens, kMaxTextTokens);
  }
  tokenize_into(n.text, "w:", n.signature_tokens, kMaxTextTokens);
  std::sort(n.signature_tokens.begin(), n.signature_tokens.end());
}

void rebuild_text(DomNode& n) {
  std::string joined;
  for (const auto& [pos, run] : n.text_runs) {
    if (run.empty()) continue;
    if (!joined.empty()) joined.push_back(' ');
    joined += run;
  }
  n.text = collapse_whitespace(joined);
}

// Mutable tree used while building.
struct Builder {
  std::vector<DomNode> nodes;
  std::vector<int> stack;

  Builder() {
    nodes.emplace_back();
    nodes[0].tag = "#root";
    stack.push_back(0);
  }

  int current() const { return stack.back(); }

  void add_text(std::string_view raw) {
    std::string run = collapse_whitespace(raw);
    if (run.empty()) return;
    DomNode& n = nodes[static_cast<std::size_t>(current())];
    const std::size_t pos = n.children.size();
    if (!n.text_runs.empty() && n.text_runs.back().first == pos) {
      n.text_runs.back().second += ' ';
      n.text_runs.back().second += run;
    } else {
      n.text_runs.emplace_back(pos, std::move(run));
    }
  }

  int open(std::string tag, std::vector<Attribute> attrs, bool push) {
    const int id = static_cast<int>(nodes.size());
    DomNode n;
    n.tag = std::move(tag);
    n.attrs = std::move(attrs);
    n.parent = current();
    nodes.push_back(std::move(n));
    nodes[static_cast<std::size_t>(nodes.back().parent)].children.push_back(id);
    if (push) stack.push_back(id);
    return id;
  }

  const std::string& tag_of(int id) const { return nodes[static_cast<std::size_t>(id)].tag; }

  // Index in the stack of the nearest open `tag`, stopping at a boundary.
  int find_in_scope(std::string_view tag,
                    const std::function<bool(std::string_view)>& boundary) const {
    for (int k = static_cast<int>(stack.size()) - 1; k >= 1; --k) {
      const auto& t = tag_of(stack[static_cast<std::size_t>(k)]);
      if (t == tag) return k;
      if (boundary(t)) return -1;
    }
    return -1;
  }

  void pop_to(int stack_index) { stack.resize(static_cast<std::size_t>(stack_index)); }

  void close_if_open(std::string_view tag,
                     const std::function<bool(std::string_view)>& boundary) {
    int k = find_in_scope(tag, boundary);
    if (k >= 1) pop_to(k);
  }

  void apply_implied_end_tags(std::string_view tag) {
    auto scope = [](std::string_view t) { return is_scope_boundary(t); };
    if (closes_paragraph(tag)) close_if_open("p", scope);
    if (tag == "li") {
      close_if_open("li", [](std::string_view t) {
        return is_scope_boundary(t) || t == "ul" || t == "ol";
      });
    } else if (tag == "dd" || tag == "dt") {
      auto b = [](std::string_view t) { return is_scope_boundary(t) || t == "dl"; };
      close_if_open("dd", b);
      close_if_open("dt", b);
    } else if (tag == "option") {
      if (tag_of(current()) == "option") stack.pop_back();
    } else if (tag == "optgroup") {
      if (tag_of(current()) == "option") stack.pop_back();
      if (tag_of(current()) == "optgroup") stack.pop_back();
    } else if (tag == "tr") {
      close_if_open("tr", [](std::string_view t) {
        return t == "table" || t == "tbody" || t == "thead" || t == "tfoot" || t == "html";
      });
    } else if (tag == "td" || tag == "th") {
      auto b = [](std::string_view t) { return t == "tr" || t == "table" || t == "html"; };
      close_if_open("td", b);
      close_if_open("th", b);
    } else if (tag == "thead" || tag == "tbody" || tag == "tfoot") {
      auto b = [](std::string_view t) { return t == "table" || t == "html"; };
      close_if_open("thead", b);
      close_if_open("tbody", b);
      close_if_open("tfoot", b);
    } else if (tag == "a") {
      close_if_open("a", scope);
    } else if (tag == "button") {
      close_if_open("button", [](std::string_view t) {
        return t != "button" && is_scope_boundary(t);
      });
    }
    if (is_heading(tag) && is_heading(tag_of(current()))) stack.pop_back();
  }

  void end_tag(std::string_view tag) {
    for (int k = static_cast<int>(stack.size()) - 1; k >= 1; --k) {
      if (tag_of(stack[static_cast<std::size_t>(k)]) == tag) {
        pop_to(k);
        return;
      }
    }
  }
};

struct Tag {
  std::string name;
  std::vector<Attribute> attrs;
  bool end = false;
  bool self_closing = false;
};

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view in) : in_(in) {}

  void run(Builder& b) {
    std::size_t text_start = 0;
    while (pos_ < in_.size()) {
      if (in_[pos_] != '<') {
        ++pos_;
        continue;
      }
      const std::size_t lt = pos_;
      if (starts_with("<!--")) {
        flush(b, text_start, lt);
        skip_comment();
        text_start = pos_;
      } else if (starts_with("<!") || starts_with("<?")) {
        flush(b, text_start, lt);
        skip_to('>');
        text_start = pos_;
      } else if (pos_ + 1 < in_.size() && is_alpha(in_[pos_ + 1])) {
        flush(b, text_start, lt);
        ++pos_;
        Tag t = read_tag(false);
        text_start = pos_;
        handle_start(b, std::move(t));
        text_start = pos_;
      } else if (pos_ + 2 < in_.size() && in_[pos_ + 1] == '/' && is_alpha(in_[pos_ + 2])) {
        flush(b, text_start, lt);
        pos_ += 2;
        Tag t = read_tag(true);
        b.end_tag(t.name);
        text_start = pos_;
      } else if (starts_with("</")) {
        flush(b, text_start, lt);
        skip_to('>');
        text_start = pos_;
      } else {
        ++pos_;
      }
    }
    flush(b, text_start, in_.size());
  }

 private:
  bool starts_with(std::string_view s) const {
    return in_.substr(pos_, s.size()) == s;
  }

  void flush(Builder& b, std::size_t from, std::size_t to) {
    if (to > from) b.add_text(decode_entities(in_.substr(from, to - from)));
  }

  void skip_comment() {
    pos_ += 4;
    // "<!-->" and "<!--->" are complete (empty) comments.
    if (starts_with(">")) { ++pos_; return; }
    if (starts_with("->")) { pos_ += 2; return; }
    auto end = in_.find("-->", pos_);
    pos_ = end == std::string_view::npos ? in_.size() : end + 3;
  }

  void skip_to(char c) {
    auto end = in_.find(c, pos_);
    pos_ = end == std::string_view::npos ? in_.size() : end + 1;
  }

  void skip_space() {
    while (pos_ < in_.size() && is_ascii_space(in_[pos_])) ++pos_;
  }

  Tag read_tag(bool end) {
    Tag t;
    t.end = end;
    std::size_t start = pos_;
    while (pos_ < in_.size() && is_name_char(in_[pos_])) ++pos_;
    t.name = to_lower_ascii(in_.substr(start, pos_ - start));
    std::set<std::string> seen;
    while (pos_ < in_.size()) {
      skip_space();
      if (pos_ >= in_.size()) break;
      char c = in_[pos_];
      if (c == '>') {
        ++pos_;
        return t;
      }
      if (c == '/') {
        ++pos_;
        if (pos_ < in_.size() && in_[pos_] == '>') {
          t.self_closing = true;
          ++pos_;
          return t;
        }
        continue;
      }
      std::size_t ns = pos_;
      ++pos_;  // an attribute name may start with '='
      while (pos_ < in_.size() && !is_ascii_space(in_[pos_]) && in_[pos_] != '/' &&
             in_[pos_] != '>' && in_[pos_] != '=') {
        ++pos_;
      }
      std::string name = to_lower_ascii(in_.substr(ns, pos_ - ns));
      std::string value;
      skip_space();
      if (pos_ < in_.size() && in_[pos_] == '=') {
        ++pos_;
        skip_space();
        if (pos_ < in_.size() && (in_[pos_] == '"' || in_[pos_] == '\'')) {
          char q = in_[pos_++];
          std::size_t vs = pos_;
          auto ve = in_.find(q, pos_);
          if (ve == std::string_view::npos) ve = in_.size();
          value = decode_entities(in_.substr(vs, ve - vs));
          pos_ = std::min(in_.size(), ve + 1);
        } else {
          std::size_t vs = pos_;
          while (pos_ < in_.size() && !is_ascii_space(in_[pos_]) && in_[pos_] != '>') ++pos_;
          value = decode_entities(in_.substr(vs, pos_ - vs));
        }
      }
      if (!end && seen.insert(name).second) t.attrs.emplace_back(std::move(name), std::move(value));
    }
    return t;
  }

  void handle_start(Builder& b, Tag t) {
    b.apply_implied_end_tags(t.name);
    const bool raw = is_raw_text_element(t.name);
    const bool rcdata = is_rcdata(t.name);
    const bool push = !is_void(t.name) && !t.self_closing;
    const int id = b.open(t.name, std::move(t.attrs), push);
    if (!push || (!raw && !rcdata)) return;
    // Raw text runs to the matching end tag (case-insensitive).
    const std::string close = "</" + t.name;
    std::size_t end = pos_;
    while (true) {
      end = in_.find("</", end);
      if (end == std::string_view::npos) break;
      if (to_lower_ascii(in_.substr(end, close.size())) == close) {
        std::size_t after = end + close.size();
        if (after >= in_.size() || is_ascii_space(in_[after]) || in_[after] == '>' ||
            in_[after] == '/') {
          break;
        }
      }
      end += 2;
    }
    std::string_view body = in_.substr(pos_, (end == std::string_view::npos ? in_.size() : end) - pos_);
    b.add_text(rcdata ? decode_entities(body) : std::string(body));
    (void)id;
    if (end == std::string_view::npos) {
      pos_ = in_.size();
    } else {
      pos_ = end + 2;
      Tag closing = read_tag(true);
      (void)closing;
    }
    b.end_tag(t.name);
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

void renumber_preorder(const std::vector<DomNode>& src, int root, std::vector<DomNode>& out) {
  std::vector<std::pair<int, int>> work{{root, -1}};
  // Iterative pre-order; children pushed in reverse.
  while (!work.empty()) {
    auto [id, parent] = work.back();
    work.pop_back();
    const int new_id = static_cast<int>(out.size());
    DomNode n = src[static_cast<std::size_t>(id)];
    n.parent = parent;
    std::vector<int> kids = std::move(n.children);
    n.children.clear();
    out.push_back(std::move(n));
    if (parent >= 0) out[static_cast<std::size_t>(parent)].children.push_back(new_id);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) work.emplace_back(*it, new_id);
  }
}

void escape_into(std::string& out, std::string_view s, bool attr) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attr) {
          out += "&quot;";
          break;
        }
        [[fallthrough]];
      default: out.push_back(c);
    }
  }
}

}  // namespace

bool is_raw_text_element(std::string_view tag) noexcept {
  return tag == "script" || tag == "style" || tag == "xmp" || tag == "iframe" ||
         tag == "noembed" || tag == "noframes";
}

const std::string* DomNode::attr(std::string_view key) const {
  for (const auto& [k, v] : attrs) {
    if (k == key) return &v;
  }
  return nullptr;
}

DomTree parse_html(std::string_view bytes) {
  // Lossy decode first so downstream code only ever sees valid UTF-8.
  const std::string utf8 = utf8_encode(utf8_decode(bytes));
  Builder b;
  Tokenizer(utf8).run(b);

  const DomNode& doc = b.nodes[0];
  if (doc.children.empty()) throw Error(ErrorCode::EmptyDocument, "no elements");
  int root = 0;
  if (doc.children.size() == 1 && doc.text_runs.empty()) root = doc.children[0];

  DomTree tree;
  renumber_preorder(b.nodes, root, tree.nodes);
  tree.root = 0;
  for (auto& n : tree.nodes) {
    rebuild_text(n);
    build_signature(n);
  }
  return tree;
}

bool same_content(const DomNode& a, const DomNode& b) {
  if (a.tag != b.tag || a.text != b.text || a.attrs.size() != b.attrs.size()) return false;
  auto sa = a.attrs;
  auto sb = b.attrs;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return sa == sb;
}

bool same_tree(const DomTree& a, const DomTree& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_content(a.nodes[i], b.nodes[i])) return false;
    if (a.nodes[i].children != b.nodes[i].children) return false;
  }
  return true;
}

DomTree normalize_tree(DomTree tree) {
  DomTree out;
  renumber_preorder(tree.nodes, tree.root, out.nodes);
  out.root = 0;
  for (auto& n : out.nodes) {
    rebuild_text(n);
    build_signature(n);
  }
  return out;
}

std::string serialize_html(const DomTree& tree) {
  std::string out;
  std::function<void(int)> emit = [&](int id) {
    const DomNode& n = tree[id];
    const bool synthetic = n.tag == "#root";
    const bool raw = is_raw_text_element(n.tag);
    if (!synthetic) {
      out += '<';
      out += n.tag;
      for (const auto& [k, v] : n.attrs) {
        out += ' ';
        out += k;
        out += "=\"";
        escape_into(out, v, true);
        out += '"';
      }
      out += '>';
      if (is_void(n.tag)) return;
    }
    std::size_t run = 0;
    auto emit_runs_at = [&](std::size_t pos) {
      while (run < n.text_runs.size() && n.text_runs[run].first == pos) {
        if (raw) {
          out += n.text_runs[run].second;
        } else {
          escape_into(out, n.text_runs[run].second, false);
        }
        out += ' ';
        ++run;
      }
    };
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      emit_runs_at(c);
      emit(n.children[c]);
    }
    while (run < n.text_runs.size()) emit_runs_at(n.text_runs[run].first);
    if (!synthetic) {
      out += "</";
      out += n.tag;
      out += '>';
    }
  };
  emit(tree.root);
  return out;
}

}  // namespace uaradar
