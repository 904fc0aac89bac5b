#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace uaradar {

using Attribute = std::pair<std::string, std::string>;

struct DomNode {
  std::string tag;               // lowercase element name
  std::vector<Attribute> attrs;  // document order, first occurrence wins
  std::string text;              // direct text only, whitespace-collapsed

  // Direct text runs keyed by the number of element children that precede
  // them, so document-order text can be reconstructed.
  std::vector<std::pair<std::size_t, std::string>> text_runs;

  std::vector<std::string> signature_tokens;  // sorted bag
  int parent = -1;
  std::vector<int> children;

  const std::string* attr(std::string_view key) const;
};

// Node ids are dense 0..n-1 in pre-order; the root is always node 0.
struct DomTree {
  std::vector<DomNode> nodes;
  int root = 0;

  std::size_t size() const noexcept { return nodes.size(); }
  const DomNode& operator[](int id) const { return nodes[static_cast<std::size_t>(id)]; }
};

// Error-tolerant HTML parsing. Comments and doctypes are dropped, script and
// style bodies are kept as the text of their element, unclosed tags are
// recovered with the usual implied-end-tag rules. When the input has several
// top-level elements (or stray top-level text) they are wrapped in a
// synthetic "#root" element. Throws Error(EmptyDocument).
DomTree parse_html(std::string_view bytes);

// Tag, attribute set (order ignored) and text all equal.
bool same_content(const DomNode& a, const DomNode& b);

// Structural equality of two trees (same shape, same_content per node).
bool same_tree(const DomTree& a, const DomTree& b);

// Rebuilds derived fields (ids, text, signature tokens) after the tree has
// been edited. `nodes` may be in any order as long as parent/children are
// consistent and `root` names the root.
DomTree normalize_tree(DomTree tree);

// Serializes back to HTML. parse_html(serialize_html(t)) reproduces t for
// trees that parse_html produced (modulo the synthetic root).
std::string serialize_html(const DomTree& tree);

// Element names whose content is kept as raw text.
bool is_raw_text_element(std::string_view tag) noexcept;

}  // namespace uaradar
