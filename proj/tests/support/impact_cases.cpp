#include "impact_cases.hpp"

#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "uaradar/backbone.hpp"
#include "uaradar/batch.hpp"

namespace fixtures {

using namespace uaradar;

namespace {

bool is_none(const std::string& config) { return config.size() == 2 && config[1] == 'N'; }

Page edit_css(Page p, const std::string& what, const std::string& with) {
  for (auto& a : p.assets) {
    if (a.kind == ResourceKind::stylesheet) a.bytes = replace(a.bytes, what, with);
  }
  return p;
}

Page append_css(Page p, const std::string& rule) {
  for (auto& a : p.assets) {
    if (a.kind == ResourceKind::stylesheet) a.bytes += rule;
  }
  return p;
}

// Applies `edit` to the None configs only.
template <typename F>
std::function<Page(const Page&, const std::string&)> for_none(F edit) {
  return [edit](const Page& base, const std::string& config) { return is_none(config) ? edit(base) : base; };
}

}  // namespace

Page impact_base(std::uint64_t seed) {
  Page p = homepage(seed);
  p.html = replace(p.html, "</aside>",
                   "<iframe src=\"https://video.test/embed/1\" width=\"320\" height=\"180\"></iframe>\n</aside>");
  return p;
}

std::vector<ImpactCase> impact_cases() {
  std::vector<ImpactCase> out;
  out.push_back({ImpactLabel::margin_collapsing_fail,
                 for_none([](const Page& p) { return edit_css(p, "margin-top: 8px", "margin-top: 24px"); })});
  out.push_back({ImpactLabel::soft_wrap_fail,
                 for_none([](const Page& p) { return append_css(p, ".headline { white-space: normal; }\n"); })});
  out.push_back({ImpactLabel::unnecessary_blank_lines,
                 for_none([](const Page& p) { return append_css(p, "article { page-break-before: always; }\n"); })});
  out.push_back({ImpactLabel::inline_css_change, for_none([](const Page& p) {
                   Page q = p;
                   q.html = replace(q.html, "<header class=\"top\">", "<header class=\"top\" style=\"padding: 4px\">");
                   return q;
                 })});
  out.push_back({ImpactLabel::lazy_loading_fail, for_none([](const Page& p) {
                   Page q = p;
                   q.html = replace(q.html, "<img src=\"", "<img src=\"/img/placeholder.gif\" data-src=\"");
                   return q;
                 })});
  out.push_back({ImpactLabel::displaced_iframe, for_none([](const Page& p) {
                   Page q = p;
                   q.html = replace(q.html, "width=\"320\" height=\"180\"", "width=\"900\" height=\"180\"");
                   return q;
                 })});
  out.push_back({ImpactLabel::disabled_component, for_none([](const Page& p) {
                   Page q = p;
                   q.html = replace(q.html, "<button class=\"sub\">", "<button class=\"sub\" disabled>");
                   return q;
                 })});
  out.push_back({ImpactLabel::browser_not_identified, for_none([](const Page& p) {
                   Page q = p;
                   q.html = replace(q.html, "<main>", "<div class=\"gate\"><p>Please complete the CAPTCHA</p></div>\n<main>");
                   return q;
                 })});
  out.push_back({ImpactLabel::content_restriction, for_none([](const Page& p) {
                   Page q = p;
                   // Sidebar copy replaced by a notice; no watched element is touched.
                   const auto b = q.html.find("</h3>\n<p>", q.html.find("<aside>")) + 9;
                   q.html.replace(b, q.html.find("</p>", b) - b, "This content is not available in your region.");
                   return q;
                 })});
  out.push_back({ImpactLabel::no_impact, [](const Page& p, const std::string& config) {
                   // Every config shows its own teaser, spelled with letters no
                   // other teaser uses, so no two comparisons see the same hunks.
                   static const std::map<std::string, std::string> kTeaser = {
                       {"C", "aaaa"}, {"CN", "bbbb"}, {"F", "cccc"}, {"FN", "dddd"}, {"W", "eeee"}, {"WN", "ffff"}};
                   Page q = p;
                   q.html = replace(q.html, "<footer>", "<footer><p>" + kTeaser.at(config) + "</p>");
                   return q;
                 }});
  out.push_back({ImpactLabel::no_pattern, [](const Page& p, const std::string&) { return p; }});
  return out;
}

std::vector<RadarReport> impact_reports(const fs::path& dir, const ImpactCase& c, std::uint64_t seed) {
  const Page base = impact_base(seed);
  std::map<std::string, Backbone> backbones;
  std::map<std::string, BrowserConfig> configs;
  for (const std::string& label : kSixConfigs) {
    const Page page = c.variant(base, label);
    const Snapshot v1 = load_snapshot(write_visit(dir / (label + "-1"), page, label, Phase::post_js, 1));
    const Snapshot v2 =
        load_snapshot(write_visit(dir / (label + "-2"), page, label, Phase::post_js, 2, "2026-01-01T00:00:20Z"));
    backbones.emplace(label, extract_backbone(v1, v2));
    configs.emplace(label, config(label));
  }
  std::vector<RadarReport> out;
  for (const auto& [l, r] : default_pairs(configs)) out.push_back(compare_backbones(backbones.at(l), backbones.at(r)));
  return out;
}

fs::path write_corpus(const fs::path& dir, std::size_t entries) {
  const std::vector<ImpactCase> cases = impact_cases();
  nlohmann::ordered_json plan;
  plan["output_dir"] = "out";
  plan["entries"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < entries; ++i) {
    const ImpactCase& c = cases[i % cases.size()];
    const Page base = impact_base(100 + i);
    const std::string id = "page" + std::to_string(i);
    nlohmann::ordered_json entry;
    entry["page_url"] = base.url;
    entry["id"] = id;
    entry["group"] = i % 2 ? "shop" : "news";
    for (const std::string& label : kSixConfigs) {
      const Page page = c.variant(base, label);
      for (Phase phase : {Phase::pre_js, Phase::post_js}) {
        for (int visit = 1; visit <= 2; ++visit) {
          const std::string stamp = "10:0" + std::to_string(visit) + ":" + std::to_string(10 + 7 * visit);
          const Page shown = with_dynamic_parts(page, stamp, visit + 2 * static_cast<int>(i));
          const std::string rel = id + "/" + label + "/" + std::string(to_string(phase)) + "/" + std::to_string(visit);
          write_visit(dir / rel, shown, label, phase, visit, "2026-01-01T00:0" + std::to_string(visit) + ":00Z");
          entry["configs"][label][std::string(to_string(phase))].push_back(rel);
        }
      }
    }
    plan["entries"].push_back(entry);
  }
  const fs::path path = dir / "plan.json";
  std::ofstream(path) << plan.dump(2) << "\n";
  return path;
}

}  // namespace fixtures
