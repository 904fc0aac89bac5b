#include <gtest/gtest.h>

#include <functional>
#include <random>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "uaradar/error.hpp"
#include "uaradar/io.hpp"
#include "uaradar/simhash.hpp"
#include "uaradar/snapshot.hpp"
#include "uaradar/text.hpp"

using namespace uaradar;
using fixtures::TempDir;

namespace {

Snapshot sample(const fixtures::fs::path& dir, Phase phase = Phase::pre_js) {
  return load_snapshot(fixtures::write_visit(dir, fixtures::homepage(3), "C", phase, 1));
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

void rewrite_manifest(const fixtures::fs::path& dir, const std::function<void(nlohmann::json&)>& edit) {
  auto j = nlohmann::json::parse(read_file(dir / "manifest.json"));
  edit(j);
  write_file_atomic(dir / "manifest.json", j.dump(2));
}

}  // namespace

TEST(Snapshot, LoadsWrittenVisit) {
  TempDir tmp("snap");
  const Snapshot s = sample(tmp / "v");
  EXPECT_EQ(s.page_url, "https://site.test/");
  EXPECT_EQ(s.config.label, "C");
  EXPECT_EQ(s.config.ua_mode, UaMode::standard);
  EXPECT_EQ(s.resources.size(), 3u);
  EXPECT_EQ(s.document().kind, ResourceKind::document);
  EXPECT_EQ(s.screenshot(), nullptr);
  EXPECT_EQ(sha256_hex(s.document().bytes()), s.document().digest);
}

TEST(Snapshot, ManifestRoundTrips) {
  TempDir tmp("snap");
  const Snapshot a = sample(tmp / "v", Phase::post_js);
  save_snapshot(a, tmp / "copy");
  const Snapshot b = load_snapshot(tmp / "copy");
  EXPECT_EQ(a, b);
  EXPECT_EQ(manifest_json(a), manifest_json(b));
}

TEST(Snapshot, MissingManifest) {
  TempDir tmp("snap");
  EXPECT_EQ(code_of([&] { load_snapshot(tmp.path()); }), ErrorCode::MissingManifest);
}

TEST(Snapshot, TamperedFileIsDigestMismatch) {
  TempDir tmp("snap");
  sample(tmp / "v");
  write_file_atomic(tmp / "v" / "page.html", "<p>changed</p>");
  EXPECT_EQ(code_of([&] { load_snapshot(tmp / "v"); }), ErrorCode::DigestMismatch);
}

TEST(Snapshot, DeletedFileIsMissingFile) {
  TempDir tmp("snap");
  sample(tmp / "v");
  std::filesystem::remove(tmp / "v" / "page.html");
  EXPECT_EQ(code_of([&] { load_snapshot(tmp / "v"); }), ErrorCode::MissingFile);
}

TEST(Snapshot, SchemaViolationsNameTheField) {
  const std::vector<std::pair<std::string, std::function<void(nlohmann::json&)>>> cases = {
      {"ua_mode", [](auto& j) { j["ua_mode"] = "spoofed"; }},
      {"phase", [](auto& j) { j["phase"] = "later"; }},
      {"visit_index", [](auto& j) { j["visit_index"] = 3; }},
      {"captured_at", [](auto& j) { j["captured_at"] = "yesterday"; }},
      {"page_url", [](auto& j) { j.erase("page_url"); }},
      {"path", [](auto& j) { j["resources"][0]["path"] = "../escape.html"; }},
      {"digest", [](auto& j) { j["resources"][0]["digest"] = "ABC"; }},
  };
  for (const auto& [field, edit] : cases) {
    TempDir tmp("snap");
    sample(tmp / "v");
    rewrite_manifest(tmp / "v", edit);
    try {
      load_snapshot(tmp / "v");
      ADD_FAILURE() << field << " accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::SchemaViolation) << field;
      EXPECT_EQ(e.detail(), field);
    }
  }
}

TEST(Snapshot, PostJsNeedsScreenshot) {
  TempDir tmp("snap");
  sample(tmp / "v", Phase::post_js);
  rewrite_manifest(tmp / "v", [](auto& j) {
    auto& res = j["resources"];
    for (std::size_t i = 0; i < res.size(); ++i) {
      if (res[i]["kind"] == "screenshot") res.erase(i);
    }
  });
  EXPECT_EQ(code_of([&] { load_snapshot(tmp / "v"); }), ErrorCode::SchemaViolation);
}

TEST(Snapshot, DuplicateUrlKeepsFirstWithWarning) {
  TempDir tmp("snap");
  SnapshotDraft d;
  d.page_url = "https://a.test/";
  d.config = fixtures::config("C");
  d.items = {{"https://a.test/", ResourceKind::document, "<p>x</p>"},
             {"https://a.test/x.js", ResourceKind::script, "var a=1;"},
             {"https://a.test/x.js", ResourceKind::script, "var a=2;"}};
  const Snapshot s = write_snapshot(d, tmp / "v");
  ASSERT_EQ(s.resources.size(), 2u);
  EXPECT_EQ(s.resources[1].bytes(), "var a=1;");
  ASSERT_EQ(s.warnings.size(), 1u);
}

namespace {

Snapshot with_assets(const std::string& page, std::vector<std::pair<std::string, std::string>> scripts) {
  Snapshot s;
  s.page_url = page;
  ResourceRecord doc;
  doc.url = page;
  doc.kind = ResourceKind::document;
  doc.content = std::make_shared<const std::string>("<p>x</p>");
  doc.digest = sha256_hex(*doc.content);
  s.resources.push_back(doc);
  for (auto& [url, body] : scripts) {
    ResourceRecord r;
    r.url = url;
    r.kind = ResourceKind::script;
    r.content = std::make_shared<const std::string>(body);
    r.digest = sha256_hex(body);
    r.byte_len = body.size();
    s.resources.push_back(r);
  }
  return s;
}

const ResourcePair* find_left(const ResourcePairing& p, const std::string& url) {
  for (const auto& pair : p.pairs) {
    if (pair.left && pair.left->url == url) return &pair;
  }
  return nullptr;
}

}  // namespace

TEST(Pairing, TiersInPrecedenceOrder) {
  std::mt19937_64 rng(11);
  const std::string bundle = fixtures::script_bytes(rng, 40);
  std::string tweaked = bundle;
  tweaked[tweaked.size() / 2] = tweaked[tweaked.size() / 2] == 'a' ? 'b' : 'a';
  const std::string other = fixtures::script_bytes(rng, 40);

  const Snapshot a = with_assets("https://p.test/", {{"https://p.test/app.js", "var a=1;"},
                                                     {"https://p.test/lib.js?v=1", "var l=1;"},
                                                     {"https://p.test/bundle.abc123.js", bundle},
                                                     {"https://p.test/only-left.js", other}});
  const Snapshot b = with_assets("https://P.test/#top", {{"https://p.test/app.js", "var a=2;"},
                                                         {"https://p.test/lib.js?v=2", "var l=2;"},
                                                         {"https://p.test/bundle.def456.js", tweaked}});
  const ResourcePairing p = pair_resources(a, b);
  EXPECT_EQ(find_left(p, "https://p.test/app.js")->basis, MatchBasis::exact_url);
  EXPECT_EQ(find_left(p, "https://p.test/lib.js?v=1")->basis, MatchBasis::path_no_query);
  const ResourcePair* lsh = find_left(p, "https://p.test/bundle.abc123.js");
  ASSERT_NE(lsh, nullptr);
  EXPECT_EQ(lsh->basis, MatchBasis::lsh_nearest);
  EXPECT_EQ(lsh->right->url, "https://p.test/bundle.def456.js");
  const ResourcePair* lone = find_left(p, "https://p.test/only-left.js");
  ASSERT_NE(lone, nullptr);
  EXPECT_EQ(lone->basis, MatchBasis::unmatched);
  EXPECT_FALSE(lone->right);
}

TEST(Pairing, NearestHashMatchesExhaustiveSearch) {
  // Oracle: the lsh tier must pick the globally closest candidate within the
  // radius, found here by brute force over every left/right combination.
  std::mt19937_64 rng(5);
  std::vector<std::pair<std::string, std::string>> left, right;
  std::vector<std::string> bodies;
  for (int i = 0; i < 4; ++i) bodies.push_back(fixtures::script_bytes(rng, 30));
  for (int i = 0; i < 4; ++i) {
    left.emplace_back("https://p.test/l" + std::to_string(i) + ".js", bodies[i]);
    std::string edited = bodies[i];
    edited.insert(edited.size() / 3, "/*x*/");
    right.emplace_back("https://p.test/r" + std::to_string(3 - i) + ".js", edited);
  }
  const ResourcePairing p = pair_resources(with_assets("https://p.test/", left), with_assets("https://p.test/", right));
  int checked = 0;
  for (int i = 0; i < 4; ++i) {
    int best = -1;
    int best_d = 65;
    for (int j = 0; j < 4; ++j) {
      const int d = hamming_distance(simhash64(left[i].second), simhash64(right[j].second));
      if (d < best_d) best_d = d, best = j;
    }
    const ResourcePair* pair = find_left(p, left[i].first);
    ASSERT_NE(pair, nullptr);
    if (best_d <= kLshPairingRadius) {
      ASSERT_TRUE(pair->right);
      EXPECT_EQ(pair->right->url, right[best].first);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(Pairing, MirrorSymmetric) {
  std::mt19937_64 rng(8);
  const Snapshot a = with_assets("https://p.test/", {{"https://p.test/a.js?x=1", "1"}, {"https://p.test/a.js?x=2", "2"}});
  const Snapshot b = with_assets("https://p.test/", {{"https://p.test/a.js?x=3", "3"}});
  const ResourcePairing ab = pair_resources(a, b);
  const ResourcePairing ba = pair_resources(b, a);
  ASSERT_EQ(ab.pairs.size(), ba.pairs.size());
  for (const auto& pair : ab.pairs) {
    bool found = false;
    for (const auto& q : ba.pairs) {
      const bool same_left = (pair.left && q.right && pair.left->url == q.right->url) || (!pair.left && !q.right);
      const bool same_right = (pair.right && q.left && pair.right->url == q.left->url) || (!pair.right && !q.left);
      if (same_left && same_right && pair.basis == q.basis) found = true;
    }
    EXPECT_TRUE(found);
  }
}

TEST(Pairing, DifferentPagesRejected) {
  EXPECT_EQ(code_of([] { pair_resources(with_assets("https://a.test/", {}), with_assets("https://b.test/", {})); }),
            ErrorCode::PageUrlMismatch);
}

TEST(Simhash, Locality) {
  std::mt19937_64 rng(21);
  std::string script;
  while (script.size() < 10'000) script += fixtures::script_bytes(rng, 10);
  std::string renamed = script;
  const std::string from = "cfg";
  const std::string to = "cfx";
  renamed.replace(renamed.find(from), from.size(), to);
  EXPECT_LE(hamming_distance(simhash64(script), simhash64(renamed)), 10);

  std::string unrelated;
  std::mt19937_64 rng2(99);
  while (unrelated.size() < 10'000) unrelated += fixtures::words(rng2, 50) + "\n";
  EXPECT_GE(hamming_distance(simhash64(script), simhash64(unrelated)), 20);
}

TEST(Simhash, EdgeCases) {
  EXPECT_EQ(simhash64("").bits, 0u);
  EXPECT_EQ(simhash64("ab"), simhash64("ab"));
  EXPECT_EQ(simhash64("a  b\n c"), simhash64("a b c"));
}
