#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "uaradar/dom.hpp"

namespace uaradar {

enum class MatchLabel { unchanged, updated };

struct NodeMatch {
  int left = -1;
  int right = -1;
  MatchLabel label = MatchLabel::unchanged;
  double score = 0.0;

  friend bool operator==(const NodeMatch&, const NodeMatch&) = default;
};

struct MatchGraph {
  std::vector<NodeMatch> matched;  // ascending left id
  std::vector<int> unmatched_left;
  std::vector<int> unmatched_right;

  std::size_t updated_count() const;
  // |E|: matched pairs plus every unmatched node once.
  std::size_t edge_count() const;
  // Edit operations: updated pairs plus unmatched nodes.
  std::size_t edit_op_count() const;
};

struct SftmOptions {
  double threshold = 0.5;
  double propagation_weight = 0.25;
  int propagation_rounds = 2;
};

// Simplified flexible tree matching: idf-weighted cosine over signature
// tokens, neighbour propagation, then greedy one-to-one assignment of pairs
// scoring at least `threshold`. Throws Error(EmptyTree).
MatchGraph sftm_match(const DomTree& left, const DomTree& right,
                      const SftmOptions& options = {});

// S1 = 1 - edit_ops / |E|. 1.0 for an identity match, 0.0 when nothing is
// matched unchanged.
double structure_similarity(const MatchGraph& graph);

// Largest |t1| * |t2| accepted by ted_oracle().
inline constexpr std::uint64_t kTedMaxCells = 1'000'000;

// Exact Zhang-Shasha ordered tree edit distance with unit insert, delete and
// relabel costs (relabel when same_content() is false). Throws
// Error(InstanceTooLarge).
std::size_t ted_oracle(const DomTree& left, const DomTree& right);

// Keeps the nodes flagged in `keep` (which must be closed under taking
// ancestors) and re-derives ids, text and signatures.
DomTree prune_tree(const DomTree& tree, const std::vector<bool>& keep);

}  // namespace uaradar
