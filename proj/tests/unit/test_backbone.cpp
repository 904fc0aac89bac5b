#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "uaradar/backbone.hpp"
#include "uaradar/domstruct.hpp"
#include "uaradar/error.hpp"
#include "uaradar/radar.hpp"
#include "uaradar/snapshot.hpp"
#include "uaradar/textdiff.hpp"

using namespace uaradar;
using fixtures::TempDir;

namespace {

Snapshot visit(const TempDir& tmp, const fixtures::Page& page, const std::string& label, Phase phase, int index,
               const std::string& at = "2026-01-01T00:00:00Z") {
  const std::string name = label + "-" + std::string(to_string(phase)) + "-" + std::to_string(index);
  return load_snapshot(fixtures::write_visit(tmp / name, page, label, phase, index, at));
}

bool has_resource(const Backbone& b, const std::string& url) {
  return std::any_of(b.stable_resources.begin(), b.stable_resources.end(),
                     [&](const ResourceRecord& r) { return r.url == url; });
}

bool dom_contains_text(const DomTree& t, const std::string& needle) {
  return std::any_of(t.nodes.begin(), t.nodes.end(),
                     [&](const DomNode& n) { return n.text.find(needle) != std::string::npos; });
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

}  // namespace

TEST(Backbone, IdenticalVisitsKeepEverything) {
  TempDir tmp("bb");
  const fixtures::Page page = fixtures::homepage(1);
  const Snapshot v1 = visit(tmp, page, "C", Phase::post_js, 1);
  const Snapshot v2 = visit(tmp, page, "C", Phase::post_js, 2, "2026-01-01T00:00:30Z");
  const Backbone b = extract_backbone(v1, v2);
  EXPECT_TRUE(same_tree(b.stable_dom, parse_html(page.html)));
  EXPECT_EQ(b.stable_text, extract_text(parse_html(page.html)));
  EXPECT_EQ(b.stable_resources.size(), page.assets.size());
  EXPECT_EQ(b.visual_floor, 0.0);
  EXPECT_EQ(b.pruned_nodes, 0u);
  EXPECT_EQ(b.source_visits, (std::vector<int>{1, 2}));
  EXPECT_EQ(b.captured_at, "2026-01-01T00:00:30Z");
  ASSERT_TRUE(b.profile);
  EXPECT_GT(b.profile->count, 0u);
}

TEST(Backbone, TimestampNodeDropped) {
  TempDir tmp("bb");
  const fixtures::Page base = fixtures::homepage(2);
  const fixtures::Page p1 = fixtures::with_dynamic_parts(base, "10:00:05", 1);
  fixtures::Page p2 = fixtures::with_dynamic_parts(base, "10:00:41", 1);
  const Snapshot v1 = visit(tmp, p1, "F", Phase::pre_js, 1);
  const Snapshot v2 = visit(tmp, p2, "F", Phase::pre_js, 2);
  const Backbone b = extract_backbone(v1, v2);
  // Manual enumeration: every element of the visit except the timestamp <p>.
  const DomTree full = parse_html(p1.html);
  EXPECT_EQ(b.stable_dom.size(), full.size() - 1);
  EXPECT_EQ(b.pruned_nodes, 1u);
  EXPECT_FALSE(dom_contains_text(b.stable_dom, "Last updated"));
  EXPECT_EQ(b.stable_text.find("10:00:05"), std::string::npos);
  EXPECT_EQ(b.stable_text.find("10:00:41"), std::string::npos);
  EXPECT_EQ(b.stable_resources.size(), p1.assets.size());
  EXPECT_TRUE(b.volatile_resources.empty());
}

TEST(Backbone, RotatedScriptDropped) {
  TempDir tmp("bb");
  const fixtures::Page base = fixtures::homepage(3);
  const fixtures::Page p1 = fixtures::with_dynamic_parts(base, "10:00:05", 1);
  const fixtures::Page p2 = fixtures::with_dynamic_parts(base, "10:00:05", 2);
  const Backbone b = extract_backbone(visit(tmp, p1, "W", Phase::pre_js, 1), visit(tmp, p2, "W", Phase::pre_js, 2));
  EXPECT_FALSE(has_resource(b, "https://ads.test/rot/1/ad.js"));
  EXPECT_FALSE(has_resource(b, "https://ads.test/rot/2/ad.js"));
  EXPECT_TRUE(has_resource(b, base.url + "static/app.js"));
  EXPECT_TRUE(has_resource(b, base.url + "static/site.css"));
  EXPECT_EQ(b.volatile_resources,
            (std::vector<std::string>{"script https://ads.test/rot/1/ad.js", "script https://ads.test/rot/2/ad.js"}));
}

TEST(Backbone, Shrinks) {
  TempDir tmp("bb");
  for (int seed = 0; seed < 6; ++seed) {
    const fixtures::Page base = fixtures::homepage(static_cast<std::uint64_t>(seed));
    const fixtures::Page p1 = fixtures::with_dynamic_parts(base, "09:1" + std::to_string(seed), seed);
    fixtures::Page p2 = fixtures::with_dynamic_parts(base, "09:4" + std::to_string(seed), seed + 10);
    p2.html = fixtures::replace(p2.html, "<h3>", "<h3>Breaking ");
    const Snapshot v1 = visit(tmp, p1, "C", Phase::pre_js, 1);
    const Snapshot v2 = visit(tmp, p2, "C", Phase::pre_js, 2);
    const Backbone b = extract_backbone(v1, v2);
    const DomTree d1 = parse_html(v1.document().bytes());
    const DomTree d2 = parse_html(v2.document().bytes());
    EXPECT_LE(b.stable_dom.size(), std::min(d1.size(), d2.size()));
    for (const ResourceRecord& r : b.stable_resources) {
      for (const Snapshot* v : {&v1, &v2}) {
        EXPECT_TRUE(std::any_of(v->resources.begin(), v->resources.end(), [&](const ResourceRecord& x) {
          return x.url == r.url && x.digest == r.digest;
        }));
      }
    }
    // Stable nodes are matched-unchanged between the visits.
    const MatchGraph g = sftm_match(d1, d2);
    std::size_t unchanged = 0;
    for (const auto& m : g.matched) unchanged += m.label == MatchLabel::unchanged;
    EXPECT_LE(b.stable_dom.size(), d1.size());
    EXPECT_GE(b.stable_dom.size(), unchanged);
  }
}

TEST(Backbone, IdempotentAfterSaveAndLoad) {
  TempDir tmp("bb");
  const fixtures::Page base = fixtures::homepage(4);
  const Snapshot v1 = visit(tmp, fixtures::with_dynamic_parts(base, "08:00", 1), "C", Phase::post_js, 1);
  const Snapshot v2 = visit(tmp, fixtures::with_dynamic_parts(base, "08:30", 2), "C", Phase::post_js, 2);
  const Backbone b = extract_backbone(v1, v2);
  save_backbone(b, tmp / "backbone");
  const Backbone loaded = load_backbone(tmp / "backbone");
  EXPECT_TRUE(equivalent(b, loaded));
  EXPECT_TRUE(equivalent(extract_backbone(loaded, loaded), loaded));
  EXPECT_TRUE(equivalent(extract_backbone(b, b), b));
}

TEST(Backbone, IdenticalContentComparesAtOne) {
  TempDir tmp("bb");
  const fixtures::Page page = fixtures::homepage(5);
  const Backbone c = extract_backbone(visit(tmp, page, "C", Phase::post_js, 1), visit(tmp, page, "C", Phase::post_js, 2));
  const Backbone f = extract_backbone(visit(tmp, page, "F", Phase::post_js, 1), visit(tmp, page, "F", Phase::post_js, 2));
  const RadarReport r = compare_backbones(c, f);
  for (Axis a : kAxes) EXPECT_EQ(r.axis(a), 1.0) << to_string(a);
}

TEST(Backbone, RejectsMismatchedVisits) {
  TempDir tmp("bb");
  const fixtures::Page page = fixtures::homepage(6);
  const Snapshot c1 = visit(tmp, page, "C", Phase::pre_js, 1);
  EXPECT_EQ(code_of([&] { extract_backbone(c1, visit(tmp, page, "F", Phase::pre_js, 2)); }), ErrorCode::ConfigMismatch);
  EXPECT_EQ(code_of([&] { extract_backbone(c1, visit(tmp, page, "C", Phase::post_js, 2)); }), ErrorCode::PhaseMismatch);
  const fixtures::Page other = fixtures::homepage(6, "https://other.test/");
  EXPECT_EQ(code_of([&] { extract_backbone(c1, visit(tmp, other, "C", Phase::pre_js, 2)); }),
            ErrorCode::PageUrlMismatch);
}

TEST(EffectiveVisual, Arithmetic) {
  EXPECT_DOUBLE_EQ(effective_visual_dissimilarity(0.4, 0.1, 0.3), 0.1);
  EXPECT_EQ(effective_visual_dissimilarity(0.2, 0.3, 0.5), 0.0);
  EXPECT_EQ(effective_visual_dissimilarity(0.7, 0.0, 0.0), 0.7);
}
