#include "uaradar/backbone.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "uaradar/domstruct.hpp"
#include "uaradar/error.hpp"
#include "uaradar/io.hpp"
#include "uaradar/text.hpp"
#include "uaradar/textdiff.hpp"
#include "uaradar/url.hpp"

namespace uaradar {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_asset(ResourceKind k) { return k == ResourceKind::script || k == ResourceKind::stylesheet; }

std::string resource_key(const ResourceRecord& r) {
  return std::string(to_string(r.kind)) + " " + r.url;
}

// Keeps matched-unchanged nodes and their ancestors. Kept nodes that changed
// lose their text, and their attributes shrink to the ones both sides agree
// on.
DomTree stable_side(const DomTree& tree, const DomTree& other, const std::vector<int>& partner,
                    const std::vector<char>& unchanged) {
  std::vector<bool> keep(tree.size(), false);
  keep[static_cast<std::size_t>(tree.root)] = true;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (!unchanged[i]) continue;
    for (int p = static_cast<int>(i); p >= 0 && !keep[static_cast<std::size_t>(p)] ; p = tree[p].parent) {
      keep[static_cast<std::size_t>(p)] = true;
    }
    keep[i] = true;
  }
  DomTree work = tree;
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (!keep[i] || unchanged[i]) continue;
    DomNode& n = work.nodes[i];
    const int j = partner[i];
    if (j < 0) {
      n.attrs.clear();
      n.text_runs.clear();
      continue;
    }
    const DomNode& m = other[j];
    std::erase_if(n.attrs, [&](const Attribute& a) {
      const std::string* v = m.attr(a.first);
      return v == nullptr || *v != a.second;
    });
    if (n.text != m.text) n.text_runs.clear();
  }
  DomTree pruned = prune_tree(work, keep);
  const DomNode& root = pruned[pruned.root];
  if (root.tag == "#root" && root.children.size() == 1 && root.text_runs.empty()) {
    // A lone child would not be wrapped again when the HTML is re-parsed.
    DomTree lifted = pruned;
    lifted.root = root.children.front();
    lifted.nodes[static_cast<std::size_t>(lifted.root)].parent = -1;
    pruned = normalize_tree(std::move(lifted));
  }
  return pruned;
}

std::string join_equal_hunks(const std::string& a, const std::string& b) {
  if (a == b) return a;
  std::string out;
  for (const Hunk& h : myers_diff(a, b).hunks) {
    if (h.op != DiffOp::equal) continue;
    out += ' ';
    out += utf8_encode(h.text);
  }
  return collapse_whitespace(out);
}

json profile_json(const ContourProfile& p) {
  return {{"count", p.count},
          {"weighted_area", p.weighted_area},
          {"weighted_moment", p.weighted_moment},
          {"gm", p.gm}};
}

ContourProfile profile_from_json(const json& j) {
  ContourProfile p;
  p.count = j.at("count").get<std::size_t>();
  p.weighted_area = j.at("weighted_area").get<double>();
  p.weighted_moment = j.at("weighted_moment").get<double>();
  p.gm = j.at("gm").get<double>();
  return p;
}

void check_compatible(const std::string& url_a, const BrowserConfig& ca, Phase pa,
                      const std::string& url_b, const BrowserConfig& cb, Phase pb) {
  if (canonicalize_url(url_a) != canonicalize_url(url_b)) {
    throw Error(ErrorCode::PageUrlMismatch, url_a + " vs " + url_b);
  }
  if (!(ca == cb)) throw Error(ErrorCode::ConfigMismatch, ca.label + " vs " + cb.label);
  if (pa != pb) {
    throw Error(ErrorCode::PhaseMismatch, std::string(to_string(pa)) + " vs " + std::string(to_string(pb)));
  }
}

}  // namespace

bool equivalent(const Backbone& a, const Backbone& b) {
  auto same_resource = [](const ResourceRecord& x, const ResourceRecord& y) {
    return x.kind == y.kind && x.url == y.url && x.digest == y.digest;
  };
  return a.page_url == b.page_url && a.config == b.config && a.phase == b.phase &&
         a.captured_at == b.captured_at &&
         a.http_status == b.http_status && a.viewport == b.viewport && a.full_page == b.full_page &&
         same_tree(a.stable_dom, b.stable_dom) && a.stable_text == b.stable_text &&
         std::equal(a.stable_resources.begin(), a.stable_resources.end(), b.stable_resources.begin(),
                    b.stable_resources.end(), same_resource) &&
         a.screenshot.has_value() == b.screenshot.has_value() &&
         (!a.screenshot || a.screenshot->digest == b.screenshot->digest) && a.profile == b.profile &&
         a.visual_floor == b.visual_floor && a.source_visits == b.source_visits &&
         a.pruned_nodes == b.pruned_nodes && a.volatile_resources == b.volatile_resources;
}

Backbone backbone_of(const Snapshot& s, const VisualOptions& options) {
  Backbone b;
  b.page_url = s.page_url;
  b.config = s.config;
  b.phase = s.phase;
  b.captured_at = s.captured_at;
  b.http_status = s.http_status;
  b.viewport = s.viewport;
  b.full_page = s.full_page;
  b.stable_dom = parse_html(s.document().bytes());
  b.stable_text = extract_text(b.stable_dom);
  for (const auto& r : s.resources) {
    if (is_asset(r.kind)) b.stable_resources.push_back(r);
  }
  if (const ResourceRecord* shot = s.screenshot()) {
    b.screenshot = *shot;
    b.profile = screenshot_profile(shot->bytes(), options);
  }
  b.source_visits = {s.visit_index};
  return b;
}

Backbone extract_backbone(const Backbone& a, const Backbone& b) {
  check_compatible(a.page_url, a.config, a.phase, b.page_url, b.config, b.phase);
  Backbone out;
  out.page_url = a.page_url;
  out.config = a.config;
  out.phase = a.phase;
  out.captured_at = std::max(a.captured_at, b.captured_at);
  out.http_status = a.http_status;
  out.viewport = a.viewport;
  out.full_page = a.full_page;

  const MatchGraph g = sftm_match(a.stable_dom, b.stable_dom);
  std::vector<int> partner_a(a.stable_dom.size(), -1), partner_b(b.stable_dom.size(), -1);
  std::vector<char> same_a(a.stable_dom.size(), 0), same_b(b.stable_dom.size(), 0);
  for (const NodeMatch& m : g.matched) {
    partner_a[static_cast<std::size_t>(m.left)] = m.right;
    partner_b[static_cast<std::size_t>(m.right)] = m.left;
    if (m.label == MatchLabel::unchanged) {
      same_a[static_cast<std::size_t>(m.left)] = 1;
      same_b[static_cast<std::size_t>(m.right)] = 1;
    }
  }
  out.stable_dom = stable_side(a.stable_dom, b.stable_dom, partner_a, same_a);
  const DomTree other = stable_side(b.stable_dom, a.stable_dom, partner_b, same_b);
  out.stable_text = join_equal_hunks(extract_text(out.stable_dom), extract_text(other));
  out.pruned_nodes = a.pruned_nodes + (a.stable_dom.size() - out.stable_dom.size());

  std::set<std::tuple<ResourceKind, std::string, std::string>> in_b;
  for (const auto& r : b.stable_resources) in_b.emplace(r.kind, r.url, r.digest);
  std::set<std::string> volatile_set(a.volatile_resources.begin(), a.volatile_resources.end());
  volatile_set.insert(b.volatile_resources.begin(), b.volatile_resources.end());
  std::set<std::tuple<ResourceKind, std::string, std::string>> kept;
  for (const auto& r : a.stable_resources) {
    if (in_b.count({r.kind, r.url, r.digest})) {
      out.stable_resources.push_back(r);
      kept.emplace(r.kind, r.url, r.digest);
    } else {
      volatile_set.insert(resource_key(r));
    }
  }
  for (const auto& r : b.stable_resources) {
    if (!kept.count({r.kind, r.url, r.digest})) volatile_set.insert(resource_key(r));
  }
  out.volatile_resources.assign(volatile_set.begin(), volatile_set.end());

  out.screenshot = a.screenshot;
  out.profile = a.profile;
  out.visual_floor = std::max(a.visual_floor, b.visual_floor);
  if (a.profile && b.profile) {
    out.visual_floor = std::max(out.visual_floor, visual_dissimilarity(*a.profile, *b.profile));
  }

  std::set<int> visits(a.source_visits.begin(), a.source_visits.end());
  visits.insert(b.source_visits.begin(), b.source_visits.end());
  out.source_visits.assign(visits.begin(), visits.end());
  return out;
}

Backbone extract_backbone(const Snapshot& v1, const Snapshot& v2, const VisualOptions& options) {
  check_compatible(v1.page_url, v1.config, v1.phase, v2.page_url, v2.config, v2.phase);
  return extract_backbone(backbone_of(v1, options), backbone_of(v2, options));
}

double effective_visual_dissimilarity(double cross, double floor_a, double floor_b) {
  return std::max(0.0, cross - std::max(floor_a, floor_b));
}

void save_backbone(const Backbone& b, const fs::path& dir) {
  SnapshotDraft draft;
  draft.page_url = b.page_url;
  draft.config = b.config;
  draft.phase = b.phase;
  draft.visit_index = b.source_visits.empty() ? 1 : b.source_visits.front();
  draft.captured_at = b.captured_at;
  draft.http_status = b.http_status;
  draft.viewport = b.viewport;
  draft.full_page = b.full_page;
  draft.items.push_back({b.page_url, ResourceKind::document, serialize_html(b.stable_dom)});
  for (const auto& r : b.stable_resources) draft.items.push_back({r.url, r.kind, r.bytes()});
  if (b.screenshot) draft.items.push_back({b.screenshot->url, ResourceKind::screenshot, b.screenshot->bytes()});

  json meta = {{"format", "uaradar-backbone/1"},
               {"visual_floor", b.visual_floor},
               {"pruned_nodes", b.pruned_nodes},
               {"volatile_resources", b.volatile_resources},
               {"stable_text", b.stable_text},
               {"source_visits", b.source_visits},
               {"profile", b.profile ? profile_json(*b.profile) : json(nullptr)}};

  fs::path target = fs::absolute(dir);
  const fs::path parent = target.parent_path();
  fs::create_directories(parent);
  std::random_device rd;
  const fs::path staging = parent / ("." + target.filename().string() + ".tmp-" + hex64((static_cast<std::uint64_t>(rd()) << 32) ^ rd()));
  try {
    write_snapshot(draft, staging);
    write_file_atomic(staging / "backbone.json", meta.dump(2) + "\n");
    std::error_code ec;
    fs::remove_all(target, ec);
    fs::rename(staging, target);
  } catch (const fs::filesystem_error& e) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw Error(ErrorCode::IoError, e.what());
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
}

Backbone load_backbone(const fs::path& dir, const VisualOptions& options) {
  const Snapshot s = load_snapshot(dir);
  if (!fs::exists(dir / "backbone.json")) return backbone_of(s, options);
  json meta;
  try {
    meta = json::parse(read_file(dir / "backbone.json"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("backbone.json: ") + e.what());
  }
  Backbone b;
  b.page_url = s.page_url;
  b.config = s.config;
  b.phase = s.phase;
  b.captured_at = s.captured_at;
  b.http_status = s.http_status;
  b.viewport = s.viewport;
  b.full_page = s.full_page;
  b.stable_dom = parse_html(s.document().bytes());
  for (const auto& r : s.resources) {
    if (is_asset(r.kind)) b.stable_resources.push_back(r);
  }
  if (const ResourceRecord* shot = s.screenshot()) b.screenshot = *shot;
  try {
    b.visual_floor = meta.at("visual_floor").get<double>();
    b.pruned_nodes = meta.at("pruned_nodes").get<std::size_t>();
    b.volatile_resources = meta.at("volatile_resources").get<std::vector<std::string>>();
    b.stable_text = meta.at("stable_text").get<std::string>();
    b.source_visits = meta.at("source_visits").get<std::vector<int>>();
    if (!meta.at("profile").is_null()) b.profile = profile_from_json(meta.at("profile"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("backbone.json: ") + e.what());
  }
  if (b.screenshot && !b.profile) b.profile = screenshot_profile(b.screenshot->bytes(), options);
  if (b.visual_floor < 0) throw Error(ErrorCode::SchemaViolation, "backbone.json: visual_floor");
  return b;
}

}  // namespace uaradar
