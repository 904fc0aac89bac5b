#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace uaradar {

struct SyntaxNode {
  std::string kind;
  std::string label;
  int parent = -1;
  std::vector<int> children;
  int height = 1;          // leaves have height 1
  int size = 1;            // nodes in the subtree
  std::uint64_t hash = 0;  // structure + labels of the subtree
};

// Ordered labelled tree with ids dense in pre-order (root = 0 when
// non-empty). Derived fields are valid after finalize().
class SyntaxTree {
 public:
  // Appends a node; callers must add nodes in pre-order.
  int add(int parent, std::string kind, std::string label);
  void finalize();

  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t size() const noexcept { return nodes_.size(); }
  int root() const noexcept { return nodes_.empty() ? -1 : 0; }
  const SyntaxNode& operator[](int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const std::vector<SyntaxNode>& nodes() const noexcept { return nodes_; }

  std::size_t leaf_count() const;
  // Ids in post-order.
  std::vector<int> postorder() const;
  bool is_descendant(int node, int ancestor) const;

  // Rebuilds a tree from nodes in arbitrary id order, renumbering pre-order.
  static SyntaxTree from_nodes(const std::vector<SyntaxNode>& nodes, int root);

 private:
  std::vector<SyntaxNode> nodes_;
};

// Exact check: same shape, kinds and labels.
bool isomorphic(const SyntaxTree& a, int ia, const SyntaxTree& b, int ib);
bool isomorphic(const SyntaxTree& a, const SyntaxTree& b);

// Parser plug-in point: a full grammar parser can replace the built-in
// lexical ones without touching the differencing code.
class AssetParser {
 public:
  virtual ~AssetParser() = default;
  virtual SyntaxTree parse(const std::string& bytes) const = 0;
};

}  // namespace uaradar
