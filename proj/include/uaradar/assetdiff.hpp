#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "uaradar/gumtree.hpp"
#include "uaradar/snapshot.hpp"
#include "uaradar/syntax_tree.hpp"

namespace uaradar {

// One file pair (or unmatched file) of a given kind.
struct AssetFileDiff {
  std::string left_url;  // empty when the file exists on the right only
  std::string right_url;
  std::string left_digest;
  std::string right_digest;
  MatchBasis basis = MatchBasis::unmatched;
  bool skipped = false;  // equal digests, no tree diff run
  std::size_t left_nodes = 0;
  std::size_t right_nodes = 0;
  std::size_t ops = 0;    // charged edit operations, at most units
  std::size_t units = 0;  // mapped + unmapped nodes
  // Stylesheets: "property: value" labels and selector lists touched by an
  // edit, from both sides. Scripts: identifier and string labels touched.
  std::vector<std::string> changed_declarations;
  std::vector<std::string> changed_selectors;
  std::vector<std::string> changed_tokens;

  friend bool operator==(const AssetFileDiff&, const AssetFileDiff&) = default;
};

struct AssetDiff {
  ResourceKind kind = ResourceKind::script;
  std::vector<AssetFileDiff> files;  // in pairing order
  std::size_t ops = 0;
  std::size_t units = 0;
  bool unmatched_charged = false;  // some file had no counterpart
  double score = 1.0;
};

// Built-in parser for scripts and stylesheets. Throws InvalidArgument for
// other kinds.
const AssetParser& default_parser(ResourceKind kind);

// Diffs one pair of files. Either side may be null (unmatched file).
AssetFileDiff diff_asset_pair(const ResourcePair& pair, const AssetParser& parser);

// S3 = 1 - sum(ops) / sum(units) over every pair of the kind; 1.0 when no
// file of the kind exists. Pairs are diffed on up to `workers` threads and
// reduced in pairing order.
AssetDiff diff_assets(const ResourcePairing& pairing, ResourceKind kind, unsigned workers = 1);
AssetDiff diff_assets(const ResourcePairing& pairing, ResourceKind kind,
                      const AssetParser& parser, unsigned workers = 1);

double asset_similarity(const ResourcePairing& pairing, ResourceKind kind);

// Recomputes the aggregate from per-file rows.
double asset_score(const std::vector<AssetFileDiff>& files);

}  // namespace uaradar
