#pragma once

// Hand-rolled random generators for property tests.

#include <algorithm>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "uaradar/dom.hpp"
#include "uaradar/syntax_tree.hpp"

namespace gen {

inline int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool coin(std::mt19937_64& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

// Strings over a small alphabet so random pairs share structure.
inline std::string text(std::mt19937_64& rng, int max_len, const std::string& alphabet = "abcde ") {
  const int n = uniform(rng, 0, max_len);
  std::string s;
  for (int i = 0; i < n; ++i) s += alphabet[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(alphabet.size()) - 1))];
  return s;
}

// Derived string: a few random inserts, deletes and substitutions.
inline std::string mutate(std::mt19937_64& rng, std::string s, int edits, const std::string& alphabet = "abcde ") {
  for (int i = 0; i < edits; ++i) {
    const int op = uniform(rng, 0, 2);
    const char c = alphabet[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(alphabet.size()) - 1))];
    if (op == 0 || s.empty()) {
      s.insert(s.begin() + uniform(rng, 0, static_cast<int>(s.size())), c);
    } else if (op == 1) {
      s.erase(s.begin() + uniform(rng, 0, static_cast<int>(s.size()) - 1));
    } else {
      s[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(s.size()) - 1))] = c;
    }
  }
  return s;
}

// Random element tree as HTML. Non-void tags only, so the parse keeps the
// generated shape exactly.
struct HtmlTree {
  struct Node {
    std::string tag;
    std::string cls;
    std::string text;
    std::vector<int> children;
  };
  std::vector<Node> nodes;  // 0 is the root

  std::string html() const { return emit(0); }

 private:
  std::string emit(int id) const {
    const Node& n = nodes[static_cast<std::size_t>(id)];
    std::string out = "<" + n.tag;
    if (!n.cls.empty()) out += " class=\"" + n.cls + "\"";
    out += ">" + n.text;
    for (int c : n.children) out += emit(c);
    return out + "</" + n.tag + ">";
  }
};

inline HtmlTree random_html_tree(std::mt19937_64& rng, int max_nodes, int min_nodes = 1) {
  static const std::vector<std::string> tags = {"div", "section", "span", "em", "b", "article"};
  static const std::vector<std::string> texts = {"", "", "news", "sport", "login", "menu", "weather", "home"};
  HtmlTree t;
  const int n = uniform(rng, min_nodes, max_nodes);
  for (int i = 0; i < n; ++i) {
    HtmlTree::Node node;
    node.tag = i == 0 ? "div" : tags[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(tags.size()) - 1))];
    if (coin(rng, 0.4)) node.cls = "c" + std::to_string(uniform(rng, 0, 3));
    node.text = texts[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(texts.size()) - 1))];
    t.nodes.push_back(node);
    if (i > 0) t.nodes[static_cast<std::size_t>(uniform(rng, 0, i - 1))].children.push_back(i);
  }
  return t;
}

// Mutated copy: relabels, deletions of leaves, and insertions.
inline HtmlTree mutate_tree(std::mt19937_64& rng, HtmlTree t, int edits) {
  static const std::vector<std::string> texts = {"", "promo", "sport", "ad", "menu"};
  for (int e = 0; e < edits; ++e) {
    const int op = uniform(rng, 0, 2);
    const int id = uniform(rng, 0, static_cast<int>(t.nodes.size()) - 1);
    auto& node = t.nodes[static_cast<std::size_t>(id)];
    if (op == 0) {
      node.text = texts[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(texts.size()) - 1))];
    } else if (op == 1 && t.nodes.size() < 12) {
      HtmlTree::Node leaf{"span", "", "new", {}};
      t.nodes.push_back(leaf);
      t.nodes[static_cast<std::size_t>(id)].children.push_back(static_cast<int>(t.nodes.size()) - 1);
    } else if (!node.children.empty()) {
      node.children.erase(node.children.begin() + uniform(rng, 0, static_cast<int>(node.children.size()) - 1));
    }
  }
  return t;
}

// Random labelled syntax tree in pre-order.
inline uaradar::SyntaxTree random_syntax_tree(std::mt19937_64& rng, int max_nodes) {
  static const std::vector<std::string> kinds = {"rule", "decl", "ident", "call"};
  static const std::vector<std::string> labels = {"a", "b", "c", "d", "e"};
  uaradar::SyntaxTree t;
  const int n = uniform(rng, 1, max_nodes);
  std::vector<int> parents;
  for (int i = 0; i < n; ++i) {
    const int parent = i == 0 ? -1 : uniform(rng, 0, i - 1);
    parents.push_back(parent);
  }
  // Pre-order ids: rebuild by DFS over the random parent array.
  std::vector<std::vector<int>> kids(static_cast<std::size_t>(n));
  for (int i = 1; i < n; ++i) kids[static_cast<std::size_t>(parents[static_cast<std::size_t>(i)])].push_back(i);
  std::vector<std::pair<int, int>> stack = {{0, -1}};
  while (!stack.empty()) {
    auto [old, parent] = stack.back();
    stack.pop_back();
    const int id = t.add(parent, kinds[static_cast<std::size_t>(uniform(rng, 0, 3))],
                         labels[static_cast<std::size_t>(uniform(rng, 0, 4))]);
    const auto& ks = kids[static_cast<std::size_t>(old)];
    for (auto it = ks.rbegin(); it != ks.rend(); ++it) stack.emplace_back(*it, id);
  }
  t.finalize();
  return t;
}

// Mutated copy: relabels, subtree deletions, leaf insertions and subtree
// moves, keeping at most `max_nodes` nodes.
inline uaradar::SyntaxTree mutate_syntax_tree(std::mt19937_64& rng, const uaradar::SyntaxTree& t, int edits,
                                              std::size_t max_nodes = 40) {
  static const std::vector<std::string> labels = {"a", "b", "c", "d", "e", "f"};
  std::vector<uaradar::SyntaxNode> nodes = t.nodes();
  auto pick = [&] { return uniform(rng, 0, static_cast<int>(nodes.size()) - 1); };
  auto reachable = [&](int from, int target) {
    std::vector<int> stack = {from};
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      if (n == target) return true;
      for (int c : nodes[static_cast<std::size_t>(n)].children) stack.push_back(c);
    }
    return false;
  };
  auto detach = [&](int n) {
    for (auto& p : nodes) std::erase(p.children, n);
  };
  for (int e = 0; e < edits; ++e) {
    const int op = uniform(rng, 0, 3);
    const int n = pick();
    if (!reachable(0, n)) continue;
    if (op == 0) {
      nodes[static_cast<std::size_t>(n)].label = labels[static_cast<std::size_t>(uniform(rng, 0, 5))];
    } else if (op == 1 && n != 0) {
      detach(n);
    } else if (op == 2 && t.size() + static_cast<std::size_t>(e) < max_nodes) {
      uaradar::SyntaxNode leaf;
      leaf.kind = "ident";
      leaf.label = labels[static_cast<std::size_t>(uniform(rng, 0, 5))];
      nodes.push_back(leaf);
      auto& kids = nodes[static_cast<std::size_t>(n)].children;
      kids.insert(kids.begin() + uniform(rng, 0, static_cast<int>(kids.size())), static_cast<int>(nodes.size()) - 1);
    } else if (op == 3 && n != 0) {
      const int target = pick();
      if (!reachable(0, target) || reachable(n, target)) continue;
      detach(n);
      auto& kids = nodes[static_cast<std::size_t>(target)].children;
      kids.insert(kids.begin() + uniform(rng, 0, static_cast<int>(kids.size())), n);
    }
  }
  return uaradar::SyntaxTree::from_nodes(nodes, 0);
}

// Shuffled copy of a vector.
template <typename T>
std::vector<T> shuffled(std::mt19937_64& rng, std::vector<T> v) {
  std::shuffle(v.begin(), v.end(), rng);
  return v;
}

}  // namespace gen
