#include <gtest/gtest.h>

#include <algorithm>
#include <climits>
#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "uaradar/asset_parsers.hpp"
#include "uaradar/assetdiff.hpp"
#include "uaradar/gumtree.hpp"
#include "uaradar/io.hpp"
#include "uaradar/simhash.hpp"
#include "uaradar/text.hpp"

using namespace uaradar;

namespace {

const fixtures::fs::path kFixtures = UARADAR_FIXTURE_DIR;
const fixtures::fs::path kOracles = UARADAR_ORACLE_DIR;

std::size_t count_kind(const SyntaxTree& t, const std::string& kind) {
  return static_cast<std::size_t>(
      std::count_if(t.nodes().begin(), t.nodes().end(), [&](const SyntaxNode& n) { return n.kind == kind; }));
}

bool has_leaf(const SyntaxTree& t, const std::string& label) {
  return std::any_of(t.nodes().begin(), t.nodes().end(),
                     [&](const SyntaxNode& n) { return n.children.empty() && n.label == label; });
}

std::size_t count_ops(const EditScript& s, EditAction a) {
  return static_cast<std::size_t>(std::count_if(s.ops.begin(), s.ops.end(), [&](const EditOp& o) { return o.action == a; }));
}

// Cheapest kind-preserving ordered edit script by the rightmost-root forest
// recursion: unit insert and delete, unit relabel within a kind, no relabel
// across kinds. Exhaustive over all valid mappings; small trees only.
class SyntaxForestDistance {
 public:
  SyntaxForestDistance(const SyntaxTree& a, const SyntaxTree& b) : a_(a), b_(b) {}
  std::size_t trees() { return run({0}, {0}); }

 private:
  using Forest = std::vector<int>;
  static constexpr std::size_t kInf = SIZE_MAX / 4;

  std::size_t run(const Forest& f, const Forest& g) {
    if (f.empty() && g.empty()) return 0;
    const auto key = std::make_pair(f, g);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::size_t best = kInf;
    if (!f.empty()) best = std::min(best, 1 + run(drop_last(a_, f), g));
    if (!g.empty()) best = std::min(best, 1 + run(f, drop_last(b_, g)));
    if (!f.empty() && !g.empty() && a_[f.back()].kind == b_[g.back()].kind) {
      const std::size_t relabel = a_[f.back()].label == b_[g.back()].label ? 0 : 1;
      best = std::min(best, relabel + run(a_[f.back()].children, b_[g.back()].children) +
                                run(Forest(f.begin(), f.end() - 1), Forest(g.begin(), g.end() - 1)));
    }
    return memo_[key] = best;
  }

  static Forest drop_last(const SyntaxTree& t, Forest f) {
    const int v = f.back();
    f.pop_back();
    f.insert(f.end(), t[v].children.begin(), t[v].children.end());
    return f;
  }

  const SyntaxTree& a_;
  const SyntaxTree& b_;
  std::map<std::pair<Forest, Forest>, std::size_t> memo_;
};

ResourceRecord record(const std::string& url, ResourceKind kind, const std::string& body) {
  ResourceRecord r;
  r.url = url;
  r.kind = kind;
  r.content = std::make_shared<const std::string>(body);
  r.digest = sha256_hex(body);
  r.byte_len = body.size();
  return r;
}

ResourcePair css_pair(const std::optional<std::string>& left, const std::optional<std::string>& right,
                      const std::string& url = "https://p.test/s.css") {
  ResourcePair p;
  if (left) p.left = record(url, ResourceKind::stylesheet, *left);
  if (right) p.right = record(url, ResourceKind::stylesheet, *right);
  p.basis = left && right ? MatchBasis::exact_url : MatchBasis::unmatched;
  return p;
}

// Stylesheet of exactly `nodes` nodes: the root, one rule, and declarations.
std::string css_of_size(int nodes, const std::string& selector) {
  std::string css = selector + " {";
  for (int i = 0; i < nodes - 2; ++i) css += " p" + std::to_string(i) + ": " + std::to_string(i) + "px;";
  return css + " }";
}

void expect_script_consistent(const SyntaxTree& t1, const SyntaxTree& t2, const EditScript& s) {
  std::set<int> left_mapped, right_mapped;
  std::size_t relabelled = 0;
  for (auto [l, r] : s.mapping) {
    EXPECT_TRUE(left_mapped.insert(l).second);
    EXPECT_TRUE(right_mapped.insert(r).second);
    EXPECT_EQ(t1[l].kind, t2[r].kind);
    relabelled += t1[l].label != t2[r].label;
  }
  EXPECT_EQ(s.mapped_count, s.mapping.size());
  EXPECT_EQ(s.total_units, t1.size() + t2.size() - s.mapped_count);
  EXPECT_EQ(count_ops(s, EditAction::remove), t1.size() - left_mapped.size());
  EXPECT_EQ(count_ops(s, EditAction::insert), t2.size() - right_mapped.size());
  EXPECT_EQ(count_ops(s, EditAction::update), relabelled);
}

}  // namespace

TEST(ParseCss, Examples) {
  const SyntaxTree t = parse_css("p { margin-top: 4px }");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].kind, "stylesheet");
  EXPECT_EQ(t[1].kind, "rule");
  EXPECT_EQ(t[1].label, "p");
  EXPECT_EQ(t[2].kind, "decl");
  EXPECT_EQ(t[2].label, "margin-top: 4px");

  const SyntaxTree m = parse_css("@media (x){ a{b:c} }");
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[1].kind, "atrule");
  EXPECT_EQ(m[1].label, "@media (x)");
  EXPECT_EQ(m[2].label, "a");
  EXPECT_EQ(m[3].label, "b: c");
}

TEST(ParseCss, NormalisesAndRecovers) {
  const SyntaxTree t = parse_css("/* c */ H1 , .X  {  COLOR :  Red ;; }  garbage { ; } div{width:1px");
  EXPECT_EQ(t[1].label, "H1, .X");  // selectors keep their case
  EXPECT_EQ(t[2].label, "color: red");
  EXPECT_TRUE(has_leaf(t, "width: 1px"));
  EXPECT_TRUE(parse_css("").size() <= 1);
}

TEST(ParseCss, RealStylesheetDeclarationCount) {
  const SyntaxTree t = parse_css(read_file(kFixtures / "assets" / "jquery-ui.css"));
  EXPECT_EQ(static_cast<long>(count_kind(t, "decl")), oracle::frozen(kOracles, "jquery-ui.css declarations"));
}

TEST(ParseJs, CallGroup) {
  const SyntaxTree t = parse_js_lexical("f(a,b)");
  ASSERT_EQ(t.size(), 8u);
  EXPECT_EQ(t[1].kind, "call");
  std::vector<std::string> leaves;
  for (int c : t[1].children) leaves.push_back(t[c].label);
  EXPECT_EQ(leaves, (std::vector<std::string>{"f", "(", "a", ",", "b", ")"}));
}

TEST(ParseJs, MarginListingHasMarginTopLeaf) {
  const SyntaxTree t = parse_js_lexical(
      "function rn(a, b, c, d) {\n  O(a.K, {\n    transition: c / 1E3 + \"s\",\n"
      "    \"transition-timing-function\": d,\n    \"margin-top\": b\n  })\n}\n");
  EXPECT_TRUE(has_leaf(t, "margin-top"));
  EXPECT_TRUE(has_leaf(t, "transition-timing-function"));
}

TEST(ParseJs, TokensCommentsAndRecovery) {
  const SyntaxTree t = parse_js_lexical("x = /a\\/b/g; // gone\n/* gone */ y = `p${q}s`; if (z) { w(");
  EXPECT_TRUE(has_leaf(t, "/a\\/b/g"));
  EXPECT_TRUE(std::any_of(t.nodes().begin(), t.nodes().end(),
                          [](const SyntaxNode& n) { return n.kind == "keyword" && n.label == "if"; }));
  EXPECT_EQ(count_kind(t, "call"), 1u);  // w( only; "if (" is not a call
  EXPECT_FALSE(has_leaf(t, "gone"));
  EXPECT_TRUE(has_leaf(t, "p"));
  EXPECT_TRUE(has_leaf(t, "q"));
  const std::string long_string = "'" + std::string(100, 'k') + "'";
  const SyntaxTree l = parse_js_lexical(long_string);
  EXPECT_EQ(l[1].label.rfind("str#", 0), 0u);
}

TEST(ParseJs, MinifiedBundleTokenCount) {
  const SyntaxTree t = parse_js_lexical(read_file(kFixtures / "assets" / "jquery.min.js"));
  EXPECT_EQ(static_cast<long>(t.leaf_count()), oracle::frozen(kOracles, "jquery.min.js tokens"));
}

TEST(SyntaxTree, SubtreeHashesAgreeWithIsomorphism) {
  // Collision check over every subtree pair of two real files.
  const SyntaxTree css = parse_css(read_file(kFixtures / "assets" / "jquery-ui.css"));
  std::map<std::uint64_t, int> first;
  for (int id = 0; id < static_cast<int>(css.size()); ++id) {
    auto [it, fresh] = first.emplace(css[id].hash, id);
    if (!fresh) {
      EXPECT_TRUE(isomorphic(css, it->second, css, id)) << id;
    }
  }
}

TEST(Gumtree, IdentityHasNoOps) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const SyntaxTree t = gen::random_syntax_tree(rng, 40);
    const EditScript s = gumtree_diff(t, t);
    EXPECT_TRUE(s.ops.empty());
    EXPECT_EQ(s.mapped_count, t.size());
    EXPECT_EQ(s.total_units, t.size());
  }
}

TEST(Gumtree, OneDeclarationChangeIsOneUpdate) {
  const std::string base = "a { color: red; } .b { margin-top: 4px; padding: 0; } #c { width: 10px; }";
  const SyntaxTree t1 = parse_css(base);
  const SyntaxTree t2 = parse_css(fixtures::replace(base, "margin-top: 4px", "margin-top: 8px"));
  ASSERT_EQ(SyntaxForestDistance(t1, t2).trees(), 1u);
  const EditScript s = gumtree_diff(t1, t2);
  ASSERT_EQ(s.ops.size(), 1u);
  EXPECT_EQ(s.ops[0].action, EditAction::update);
  EXPECT_EQ(s.ops[0].label, "margin-top: 8px");
  expect_script_consistent(t1, t2, s);
}

TEST(Gumtree, AppendedRuleIsInsertedSubtree) {
  const std::string base = "a { color: red; } .b { margin-top: 4px; padding: 0; } #c { width: 10px; }";
  const SyntaxTree t1 = parse_css(base);
  const SyntaxTree t2 = parse_css(base + " .new { color: blue; border: 0; }");
  const std::size_t appended = t2.size() - t1.size();
  ASSERT_EQ(appended, 3u);
  ASSERT_EQ(SyntaxForestDistance(t1, t2).trees(), appended);
  const EditScript s = gumtree_diff(t1, t2);
  EXPECT_EQ(s.ops.size(), appended);
  EXPECT_EQ(count_ops(s, EditAction::insert), appended);
  expect_script_consistent(t1, t2, s);
}

TEST(Gumtree, EditScriptReplaysToTarget) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const SyntaxTree t1 = gen::random_syntax_tree(rng, 40);
    const SyntaxTree t2 = i % 3 == 0 ? gen::random_syntax_tree(rng, 40)
                                     : gen::mutate_syntax_tree(rng, t1, gen::uniform(rng, 1, 8));
    const EditScript s = gumtree_diff(t1, t2);
    expect_script_consistent(t1, t2, s);
    EXPECT_TRUE(isomorphic(apply_edit_script(t1, s), t2)) << i;
  }
}

TEST(Gumtree, RealBundleEditReplays) {
  const std::string js = read_file(kFixtures / "assets" / "jquery.min.js");
  const SyntaxTree t1 = parse_js_lexical(js);
  std::string edited = js;
  edited.insert(edited.size() / 2, ";var injected=navigator.userAgent;");
  const SyntaxTree t2 = parse_js_lexical(edited);
  const EditScript s = gumtree_diff(t1, t2);
  EXPECT_TRUE(isomorphic(apply_edit_script(t1, s), t2));
  EXPECT_LT(s.ops.size(), 40u);
}

TEST(AssetSimilarity, WeightedByNodeCount) {
  const std::string kept = css_of_size(900, ".kept");
  const std::string gone = css_of_size(100, ".gone");
  ResourcePairing p;
  p.pairs.push_back(css_pair(kept, kept, "https://p.test/kept.css"));
  p.pairs.push_back(css_pair(gone, std::nullopt, "https://p.test/gone.css"));
  const AssetDiff d = diff_assets(p, ResourceKind::stylesheet);
  EXPECT_EQ(d.units, 1000u);
  EXPECT_EQ(d.ops, 100u);
  EXPECT_TRUE(d.unmatched_charged);
  EXPECT_DOUBLE_EQ(d.score, 0.9);
  EXPECT_DOUBLE_EQ(asset_score(d.files), 0.9);
}

TEST(AssetSimilarity, ExtremeCases) {
  ResourcePairing none;
  EXPECT_EQ(asset_similarity(none, ResourceKind::script), 1.0);
  ResourcePairing same;
  same.pairs.push_back(css_pair("a{b:c}", "a{b:c}"));
  EXPECT_EQ(asset_similarity(same, ResourceKind::stylesheet), 1.0);
  EXPECT_EQ(asset_similarity(same, ResourceKind::script), 1.0);
  ResourcePairing disjoint;
  disjoint.pairs.push_back(css_pair("a{b:c}", std::nullopt, "https://p.test/1.css"));
  disjoint.pairs.push_back(css_pair(std::nullopt, "x{y:z}", "https://p.test/2.css"));
  EXPECT_EQ(asset_similarity(disjoint, ResourceKind::stylesheet), 0.0);
}

TEST(AssetSimilarity, SkipPathEqualsFullDiff) {
  std::mt19937_64 rng(2);
  const std::string css = fixtures::stylesheet_bytes(rng, 12);
  const AssetFileDiff fast = diff_asset_pair(css_pair(css, css), default_parser(ResourceKind::stylesheet));
  EXPECT_TRUE(fast.skipped);
  const SyntaxTree t = parse_css(css);
  const EditScript full = gumtree_diff(t, t);
  EXPECT_EQ(fast.ops, full.ops.size());
  EXPECT_EQ(fast.units, full.total_units);
}

TEST(AssetSimilarity, SymmetricAndOneOnlyWhenUnchanged) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 40; ++i) {
    const std::string a = fixtures::stylesheet_bytes(rng, 5);
    const std::string b = gen::coin(rng) ? a : fixtures::stylesheet_bytes(rng, 5);
    ResourcePairing ab, ba;
    ab.pairs.push_back(css_pair(a, b));
    ba.pairs.push_back(css_pair(b, a));
    const double s = asset_similarity(ab, ResourceKind::stylesheet);
    EXPECT_EQ(s, asset_similarity(ba, ResourceKind::stylesheet));
    EXPECT_EQ(s == 1.0, a == b);
  }
}

TEST(AssetSimilarity, ChangedDeclarationsReported) {
  const std::string base = ".headline { margin-top: 8px; } p { color: red; }";
  const AssetFileDiff f = diff_asset_pair(css_pair(base, fixtures::replace(base, "8px", "0")),
                                          default_parser(ResourceKind::stylesheet));
  EXPECT_EQ(f.ops, 1u);
  EXPECT_NE(std::find(f.changed_declarations.begin(), f.changed_declarations.end(), "margin-top: 0"),
            f.changed_declarations.end());
  EXPECT_NE(std::find(f.changed_declarations.begin(), f.changed_declarations.end(), "margin-top: 8px"),
            f.changed_declarations.end());
}

TEST(Simhash, LocalityOverCorpus) {
  std::mt19937_64 rng(44);
  std::vector<std::string> corpus;
  for (int i = 0; i < 1000; ++i) corpus.push_back(fixtures::script_bytes(rng, 12 + i % 8));
  int near = 0;
  for (const std::string& file : corpus) {
    std::string mutated = file;
    const auto pos = mutated.find("return s.length");
    mutated.replace(pos, 15, "return s.size");
    near += hamming_distance(simhash64(file), simhash64(mutated)) <= 6;
  }
  EXPECT_GE(near, 900);
  int unrelated = 0;
  std::mt19937_64 pick(45);
  for (int i = 0; i < 1000; ++i) {
    std::string other;
    while (other.size() < corpus[static_cast<std::size_t>(i)].size()) other += fixtures::words(pick, 40) + ";\n";
    unrelated += hamming_distance(simhash64(corpus[static_cast<std::size_t>(i)]), simhash64(other)) <= 6;
  }
  EXPECT_LE(unrelated, 50);
}
