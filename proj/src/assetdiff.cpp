#include "uaradar/assetdiff.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "uaradar/asset_parsers.hpp"
#include "uaradar/error.hpp"

namespace uaradar {

const AssetParser& default_parser(ResourceKind kind) {
  static const CssParser css;
  static const JsLexicalParser js;
  switch (kind) {
    case ResourceKind::stylesheet: return css;
    case ResourceKind::script: return js;
    default: break;
  }
  throw Error(ErrorCode::InvalidArgument, "no asset parser for " + std::string(to_string(kind)));
}

namespace {

struct Evidence {
  std::set<std::string> declarations;
  std::set<std::string> selectors;
  std::set<std::string> tokens;

  void touch(const SyntaxTree& t, int id) {
    const SyntaxNode& n = t[id];
    if (n.kind == "decl") {
      declarations.insert(n.label);
      for (int p = n.parent; p >= 0; p = t[p].parent) {
        if (t[p].kind == "rule") {
          selectors.insert(t[p].label);
          break;
        }
      }
    } else if (n.kind == "rule") {
      selectors.insert(n.label);
    } else if (n.kind == "atrule") {
      selectors.insert(n.label);
    } else if (n.kind == "ident" || n.kind == "str" || n.kind == "template") {
      tokens.insert(n.label);
    }
  }
};

std::vector<std::string> to_vector(const std::set<std::string>& s) { return {s.begin(), s.end()}; }

}  // namespace

AssetFileDiff diff_asset_pair(const ResourcePair& pair, const AssetParser& parser) {
  AssetFileDiff out;
  out.basis = pair.basis;
  if (pair.left) {
    out.left_url = pair.left->url;
    out.left_digest = pair.left->digest;
  }
  if (pair.right) {
    out.right_url = pair.right->url;
    out.right_digest = pair.right->digest;
  }
  if (!pair.left || !pair.right) {
    const ResourceRecord& only = pair.left ? *pair.left : *pair.right;
    const std::size_t n = parser.parse(only.bytes()).size();
    (pair.left ? out.left_nodes : out.right_nodes) = n;
    out.ops = out.units = n;
    return out;
  }
  if (pair.left->digest == pair.right->digest) {
    out.skipped = true;
    out.left_nodes = out.right_nodes = out.units = parser.parse(pair.left->bytes()).size();
    return out;
  }
  // Canonical argument order keeps the contribution symmetric.
  const bool swap = pair.right->digest < pair.left->digest;
  const SyntaxTree a = parser.parse((swap ? pair.right : pair.left)->bytes());
  const SyntaxTree b = parser.parse((swap ? pair.left : pair.right)->bytes());
  out.left_nodes = swap ? b.size() : a.size();
  out.right_nodes = swap ? a.size() : b.size();
  const EditScript script = gumtree_diff(a, b);
  out.units = script.total_units;
  out.ops = std::min(script.ops.size(), script.total_units);

  Evidence ev;
  for (const EditOp& op : script.ops) {
    if (op.left >= 0) ev.touch(a, op.left);
    if (op.right >= 0) ev.touch(b, op.right);
  }
  out.changed_declarations = to_vector(ev.declarations);
  out.changed_selectors = to_vector(ev.selectors);
  out.changed_tokens = to_vector(ev.tokens);
  return out;
}

double asset_score(const std::vector<AssetFileDiff>& files) {
  std::size_t ops = 0, units = 0;
  for (const auto& f : files) {
    ops += f.ops;
    units += f.units;
  }
  if (units == 0) return 1.0;
  return 1.0 - static_cast<double>(ops) / static_cast<double>(units);
}

AssetDiff diff_assets(const ResourcePairing& pairing, ResourceKind kind, const AssetParser& parser,
                      unsigned workers) {
  std::vector<const ResourcePair*> selected;
  for (const auto& p : pairing.pairs) {
    const ResourceRecord& r = p.left ? *p.left : *p.right;
    if (r.kind == kind) selected.push_back(&p);
  }
  AssetDiff out;
  out.kind = kind;
  out.files.resize(selected.size());

  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(selected.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < selected.size();) {
      try {
        out.files[i] = diff_asset_pair(*selected[i], parser);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (n <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& f : out.files) {
    out.ops += f.ops;
    out.units += f.units;
    if (f.basis == MatchBasis::unmatched) out.unmatched_charged = true;
  }
  out.score = asset_score(out.files);
  return out;
}

AssetDiff diff_assets(const ResourcePairing& pairing, ResourceKind kind, unsigned workers) {
  return diff_assets(pairing, kind, default_parser(kind), workers);
}

double asset_similarity(const ResourcePairing& pairing, ResourceKind kind) {
  return diff_assets(pairing, kind).score;
}

}  // namespace uaradar
