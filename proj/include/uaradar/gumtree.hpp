#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uaradar/syntax_tree.hpp"

namespace uaradar {

enum class EditAction { insert, remove, update, move };

std::string_view to_string(EditAction a) noexcept;  // remove -> "delete"

// Ops address a working copy of t1: ids below |t1| are t1 nodes, inserted
// nodes take the next free id in order of insertion. parent == -1 denotes a
// virtual root above both trees. For move, position is the index in the
// destination's children after the node has been detached.
struct EditOp {
  EditAction action = EditAction::insert;
  int node = -1;
  int left = -1;   // t1 node (update, move, delete)
  int right = -1;  // t2 node (insert, update, move)
  int parent = -1;
  std::size_t position = 0;
  std::string kind;   // insert
  std::string label;  // insert, update (new label)
};

struct EditScript {
  std::vector<EditOp> ops;
  std::vector<std::pair<int, int>> mapping;  // (t1, t2), sorted
  std::size_t mapped_count = 0;
  std::size_t total_units = 0;  // |t1| + |t2| - mapped_count
};

struct GumtreeOptions {
  int min_height = 2;
  double min_dice = 0.5;
};

// Node mapping: top-down greedy isomorphic subtrees, bottom-up containers
// by dice, then a deterministic child-alignment pass below mapped pairs.
// Mapped nodes always share their kind.
std::vector<std::pair<int, int>> gumtree_match(const SyntaxTree& t1, const SyntaxTree& t2,
                                               const GumtreeOptions& options = {});

EditScript gumtree_diff(const SyntaxTree& t1, const SyntaxTree& t2,
                        const GumtreeOptions& options = {});

// Replays ops against t1. Throws InvalidArgument on an inconsistent script.
SyntaxTree apply_edit_script(const SyntaxTree& t1, const EditScript& script);

}  // namespace uaradar
