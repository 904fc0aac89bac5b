#include "uaradar/syntax_tree.hpp"

#include <algorithm>

#include "uaradar/text.hpp"

namespace uaradar {

int SyntaxTree::add(int parent, std::string kind, std::string label) {
  const int id = static_cast<int>(nodes_.size());
  SyntaxNode n;
  n.kind = std::move(kind);
  n.label = std::move(label);
  n.parent = parent;
  nodes_.push_back(std::move(n));
  if (parent >= 0) nodes_[static_cast<std::size_t>(parent)].children.push_back(id);
  return id;
}

void SyntaxTree::finalize() {
  // Pre-order ids: every child id is greater than its parent's, so a reverse
  // sweep sees children first.
  for (std::size_t k = nodes_.size(); k-- > 0;) {
    SyntaxNode& n = nodes_[k];
    n.height = 1;
    n.size = 1;
    std::uint64_t h = stable_hash64(n.kind) * 31 + stable_hash64(n.label);
    for (int c : n.children) {
      const SyntaxNode& ch = nodes_[static_cast<std::size_t>(c)];
      n.height = std::max(n.height, ch.height + 1);
      n.size += ch.size;
      h = mix64(h ^ ch.hash) + 0x9E37;
    }
    n.hash = mix64(h + static_cast<std::uint64_t>(n.children.size()));
  }
}

std::size_t SyntaxTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(),
                                                [](const SyntaxNode& n) { return n.children.empty(); }));
}

std::vector<int> SyntaxTree::postorder() const {
  std::vector<int> out;
  if (nodes_.empty()) return out;
  out.reserve(nodes_.size());
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto& [id, next] = stack.back();
    const auto& kids = nodes_[static_cast<std::size_t>(id)].children;
    if (next < kids.size()) {
      const int child = kids[next++];
      stack.emplace_back(child, 0);
    } else {
      out.push_back(id);
      stack.pop_back();
    }
  }
  return out;
}

bool SyntaxTree::is_descendant(int node, int ancestor) const {
  for (int p = nodes_[static_cast<std::size_t>(node)].parent; p >= 0;
       p = nodes_[static_cast<std::size_t>(p)].parent) {
    if (p == ancestor) return true;
  }
  return false;
}

SyntaxTree SyntaxTree::from_nodes(const std::vector<SyntaxNode>& nodes, int root) {
  SyntaxTree t;
  if (root < 0) return t;
  std::vector<std::pair<int, int>> work{{root, -1}};
  while (!work.empty()) {
    auto [id, parent] = work.back();
    work.pop_back();
    const SyntaxNode& src = nodes[static_cast<std::size_t>(id)];
    const int nid = t.add(parent, src.kind, src.label);
    for (auto it = src.children.rbegin(); it != src.children.rend(); ++it) work.emplace_back(*it, nid);
  }
  t.finalize();
  return t;
}

bool isomorphic(const SyntaxTree& a, int ia, const SyntaxTree& b, int ib) {
  std::vector<std::pair<int, int>> stack{{ia, ib}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    const SyntaxNode& nx = a[x];
    const SyntaxNode& ny = b[y];
    if (nx.hash != ny.hash || nx.size != ny.size || nx.kind != ny.kind ||
        nx.label != ny.label || nx.children.size() != ny.children.size()) {
      return false;
    }
    for (std::size_t k = 0; k < nx.children.size(); ++k) {
      stack.emplace_back(nx.children[k], ny.children[k]);
    }
  }
  return true;
}

bool isomorphic(const SyntaxTree& a, const SyntaxTree& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  return isomorphic(a, 0, b, 0);
}

}  // namespace uaradar
