#include "uaradar/radar.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <nlohmann/json.hpp>

#include "uaradar/domstruct.hpp"
#include "uaradar/error.hpp"
#include "uaradar/io.hpp"
#include "uaradar/text.hpp"
#include "uaradar/textdiff.hpp"
#include "uaradar/url.hpp"

namespace uaradar {

using json = nlohmann::ordered_json;

std::string_view to_string(Axis a) noexcept {
  switch (a) {
    case Axis::html_structure: return "html_structure";
    case Axis::html_content: return "html_content";
    case Axis::visual: return "visual";
    case Axis::javascript: return "javascript";
    case Axis::css: return "css";
  }
  return "?";
}

std::string_view axis_title(Axis a) noexcept {
  switch (a) {
    case Axis::html_structure: return "HTML structure";
    case Axis::html_content: return "HTML content";
    case Axis::visual: return "Visual";
    case Axis::javascript: return "JavaScript";
    case Axis::css: return "CSS";
  }
  return "?";
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::vector<std::string> status_markers(std::string_view text, std::optional<int> http_status) {
  const std::string lower = to_lower_ascii(text);
  auto word_at = [&](std::size_t pos, std::size_t len) {
    const bool left_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(lower[pos - 1]));
    const bool right_ok = pos + len >= lower.size() || !std::isalnum(static_cast<unsigned char>(lower[pos + len]));
    return left_ok && right_ok;
  };
  auto has_word = [&](std::string_view w) {
    for (auto p = lower.find(w); p != std::string::npos; p = lower.find(w, p + 1)) {
      if (word_at(p, w.size())) return true;
    }
    return false;
  };
  std::vector<std::string> out;
  // Sorted output order.
  if (has_word("403") || http_status == 403) out.push_back("403");
  if (lower.find("captcha") != std::string::npos) out.push_back("captcha");
  if (has_word("error") || (http_status && *http_status >= 400 && *http_status != 403)) out.push_back("error");
  if (has_word("forbidden")) out.push_back("forbidden");
  return out;
}

namespace {

constexpr std::size_t kExcerptChars = 80;

std::string excerpt(const std::u32string& s) {
  return utf8_encode(std::u32string_view(s).substr(0, kExcerptChars));
}

bool watched(std::string_view name) {
  return std::find(kWatchedAttributes.begin(), kWatchedAttributes.end(), name) != kWatchedAttributes.end();
}

std::vector<AttributeChange> attribute_changes(const DomTree& a, const DomTree& b, const MatchGraph& g) {
  std::vector<AttributeChange> out;
  auto one_sided = [&](const DomTree& t, int id, bool left) {
    const DomNode& n = t[id];
    for (const auto& [k, v] : n.attrs) {
      if (!watched(k)) continue;
      AttributeChange c{n.tag, k, std::nullopt, std::nullopt};
      (left ? c.left : c.right) = v;
      out.push_back(std::move(c));
    }
  };
  for (const NodeMatch& m : g.matched) {
    if (m.label == MatchLabel::unchanged) continue;
    const DomNode& x = a[m.left];
    const DomNode& y = b[m.right];
    for (std::string_view name : kWatchedAttributes) {
      const std::string* vx = x.attr(name);
      const std::string* vy = y.attr(name);
      if (!vx && !vy) continue;
      if (vx && vy && *vx == *vy) continue;
      AttributeChange c{x.tag, std::string(name), std::nullopt, std::nullopt};
      if (vx) c.left = *vx;
      if (vy) c.right = *vy;
      out.push_back(std::move(c));
    }
  }
  for (int id : g.unmatched_left) one_sided(a, id, true);
  for (int id : g.unmatched_right) one_sided(b, id, false);
  return out;
}

AssetEvidence asset_evidence(AssetDiff d) {
  return {d.ops, d.units, d.unmatched_charged, std::move(d.files)};
}

Snapshot resource_view(const Backbone& b) {
  Snapshot s;
  s.page_url = b.page_url;
  s.config = b.config;
  s.phase = b.phase;
  s.resources = b.stable_resources;
  return s;
}

}  // namespace

RadarReport compare_backbones(const Backbone& a, const Backbone& b, const CompareOptions& options) {
  if (canonicalize_url(a.page_url) != canonicalize_url(b.page_url)) {
    throw Error(ErrorCode::PageUrlMismatch, a.page_url + " vs " + b.page_url);
  }
  if (a.phase != b.phase) {
    throw Error(ErrorCode::PhaseMismatch, std::string(to_string(a.phase)) + " vs " + std::string(to_string(b.phase)));
  }
  if (a.phase == Phase::post_js && (a.full_page != b.full_page || a.viewport != b.viewport)) {
    throw Error(ErrorCode::ConfigMismatch, "screenshot viewport or full_page flag differs");
  }
  RadarReport r;
  r.page_url = a.page_url;
  r.pair_label = options.pair_label ? *options.pair_label : a.config.label + b.config.label;
  r.phase = a.phase;
  r.left = a.config;
  r.right = b.config;
  r.created_at = std::max(a.captured_at, b.captured_at);
  ReportEvidence e;

  const MatchGraph g = sftm_match(a.stable_dom, b.stable_dom);
  e.structure = {g.matched.size(), g.updated_count(), g.unmatched_left.size(), g.unmatched_right.size(),
                 g.edge_count(), g.edit_op_count()};
  e.attributes = attribute_changes(a.stable_dom, b.stable_dom, g);

  const std::string left_text = options.raw_html_content ? serialize_html(a.stable_dom) : a.stable_text;
  const std::string right_text = options.raw_html_content ? serialize_html(b.stable_dom) : b.stable_text;
  const ContentScore cs = content_similarity(left_text, right_text);
  e.content.raw_html = options.raw_html_content;
  e.content.distance = cs.d;
  e.content.len_left = cs.len_left;
  e.content.len_right = cs.len_right;
  if (left_text != right_text) {
    // Canonical argument order keeps the hunk split independent of side.
    const bool swap = right_text < left_text;
    const DiffScript script = swap ? myers_diff(right_text, left_text) : myers_diff(left_text, right_text);
    for (const Hunk& h : script.hunks) {
      if (h.op == DiffOp::equal) continue;
      DiffOp op = h.op;
      if (swap) op = op == DiffOp::insert ? DiffOp::remove : DiffOp::insert;
      e.content.hunks.push_back({op, sha256_hex(utf8_encode(h.text)).substr(0, 16), excerpt(h.text)});
    }
  }

  const ResourcePairing pairing = pair_resources(resource_view(a), resource_view(b));
  e.javascript = asset_evidence(diff_assets(pairing, ResourceKind::script));
  e.css = asset_evidence(diff_assets(pairing, ResourceKind::stylesheet));

  if (a.phase == Phase::post_js && a.profile && b.profile) {
    VisualEvidence v;
    v.left = *a.profile;
    v.right = *b.profile;
    v.cross = visual_dissimilarity(v.left, v.right);
    v.floor_left = a.visual_floor;
    v.floor_right = b.visual_floor;
    v.effective = effective_visual_dissimilarity(v.cross, v.floor_left, v.floor_right);
    e.visual = v;
  }

  e.status.left = status_markers(a.stable_text, a.http_status);
  e.status.right = status_markers(b.stable_text, b.http_status);
  e.status.http_left = a.http_status;
  e.status.http_right = b.http_status;

  r.axes = recompute_axes(e, r.phase);
  r.evidence = std::move(e);
  return r;
}

std::array<std::optional<double>, 5> recompute_axes(const ReportEvidence& e, Phase phase) {
  std::array<std::optional<double>, 5> axes{};
  const auto& s = e.structure;
  axes[0] = s.edge_count == 0 ? 1.0 : 1.0 - static_cast<double>(s.edit_ops) / static_cast<double>(s.edge_count);
  axes[1] = normalized_content_similarity(e.content.distance, e.content.len_left, e.content.len_right);
  if (phase == Phase::post_js && e.visual) {
    const double eff = effective_visual_dissimilarity(e.visual->cross, e.visual->floor_left, e.visual->floor_right);
    axes[2] = 1.0 - eff / 2.0;
  }
  axes[3] = asset_score(e.javascript.files);
  axes[4] = asset_score(e.css.files);
  return axes;
}

// ---- JSON ----------------------------------------------------------------

namespace {

json opt_string(const std::string& s) { return s.empty() ? json(nullptr) : json(s); }
std::string get_opt_string(const json& j) { return j.is_null() ? std::string() : j.get<std::string>(); }

json config_json(const BrowserConfig& c) {
  return {{"engine_id", c.engine_id}, {"ua_mode", to_string(c.ua_mode)}, {"label", c.label}};
}

BrowserConfig config_from(const json& j) {
  BrowserConfig c;
  c.engine_id = j.at("engine_id").get<std::string>();
  const auto mode = parse_ua_mode(j.at("ua_mode").get<std::string>());
  if (!mode) throw Error(ErrorCode::SchemaViolation, "ua_mode");
  c.ua_mode = *mode;
  c.label = j.at("label").get<std::string>();
  return c;
}

json profile6(const ContourProfile& p) {
  return {{"count", p.count},
          {"weighted_area", round6(p.weighted_area)},
          {"weighted_moment", round6(p.weighted_moment)},
          {"gm", round6(p.gm)}};
}

ContourProfile profile_from(const json& j) {
  ContourProfile p;
  p.count = j.at("count").get<std::size_t>();
  p.weighted_area = j.at("weighted_area").get<double>();
  p.weighted_moment = j.at("weighted_moment").get<double>();
  p.gm = j.at("gm").get<double>();
  return p;
}

std::string_view op_name(DiffOp op) { return op == DiffOp::insert ? "insert" : op == DiffOp::remove ? "delete" : "equal"; }

DiffOp op_from(const std::string& s) {
  if (s == "insert") return DiffOp::insert;
  if (s == "delete") return DiffOp::remove;
  if (s == "equal") return DiffOp::equal;
  throw Error(ErrorCode::SchemaViolation, "hunk op " + s);
}

json file_json(const AssetFileDiff& f) {
  return {{"left_url", opt_string(f.left_url)},
          {"right_url", opt_string(f.right_url)},
          {"left_digest", opt_string(f.left_digest)},
          {"right_digest", opt_string(f.right_digest)},
          {"basis", to_string(f.basis)},
          {"skipped", f.skipped},
          {"left_nodes", f.left_nodes},
          {"right_nodes", f.right_nodes},
          {"ops", f.ops},
          {"units", f.units},
          {"changed_declarations", f.changed_declarations},
          {"changed_selectors", f.changed_selectors},
          {"changed_tokens", f.changed_tokens}};
}

MatchBasis basis_from(const std::string& s) {
  for (MatchBasis b : {MatchBasis::exact_url, MatchBasis::path_no_query, MatchBasis::lsh_nearest, MatchBasis::unmatched}) {
    if (to_string(b) == s) return b;
  }
  throw Error(ErrorCode::SchemaViolation, "basis " + s);
}

AssetFileDiff file_from(const json& j) {
  AssetFileDiff f;
  f.left_url = get_opt_string(j.at("left_url"));
  f.right_url = get_opt_string(j.at("right_url"));
  f.left_digest = get_opt_string(j.at("left_digest"));
  f.right_digest = get_opt_string(j.at("right_digest"));
  f.basis = basis_from(j.at("basis").get<std::string>());
  f.skipped = j.at("skipped").get<bool>();
  f.left_nodes = j.at("left_nodes").get<std::size_t>();
  f.right_nodes = j.at("right_nodes").get<std::size_t>();
  f.ops = j.at("ops").get<std::size_t>();
  f.units = j.at("units").get<std::size_t>();
  f.changed_declarations = j.at("changed_declarations").get<std::vector<std::string>>();
  f.changed_selectors = j.at("changed_selectors").get<std::vector<std::string>>();
  f.changed_tokens = j.at("changed_tokens").get<std::vector<std::string>>();
  return f;
}

json assets_json(const AssetEvidence& a) {
  json files = json::array();
  for (const auto& f : a.files) files.push_back(file_json(f));
  return {{"ops", a.ops}, {"units", a.units}, {"unmatched_charged", a.unmatched_charged}, {"files", files}};
}

AssetEvidence assets_from(const json& j) {
  AssetEvidence a;
  a.ops = j.at("ops").get<std::size_t>();
  a.units = j.at("units").get<std::size_t>();
  a.unmatched_charged = j.at("unmatched_charged").get<bool>();
  for (const auto& f : j.at("files")) a.files.push_back(file_from(f));
  return a;
}

json opt_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }
std::optional<int> get_opt_int(const json& j) { return j.is_null() ? std::nullopt : std::optional<int>(j.get<int>()); }
json opt_value(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }
std::optional<std::string> get_opt_value(const json& j) {
  return j.is_null() ? std::nullopt : std::optional<std::string>(j.get<std::string>());
}

json evidence_json(const ReportEvidence& e) {
  json hunks = json::array();
  for (const auto& h : e.content.hunks) hunks.push_back({{"op", op_name(h.op)}, {"digest", h.digest}, {"excerpt", h.excerpt}});
  json attrs = json::array();
  for (const auto& c : e.attributes) {
    attrs.push_back({{"tag", c.tag}, {"name", c.name}, {"left", opt_value(c.left)}, {"right", opt_value(c.right)}});
  }
  json visual = nullptr;
  if (e.visual) {
    visual = {{"left", profile6(e.visual->left)},
              {"right", profile6(e.visual->right)},
              {"cross", e.visual->cross},
              {"floor_left", e.visual->floor_left},
              {"floor_right", e.visual->floor_right},
              {"effective", e.visual->effective},
              {"floor_rule", "max(0, cross - max(floor_left, floor_right))"}};
  }
  const auto& s = e.structure;
  return {{"html_structure",
           {{"matched", s.matched},
            {"updated", s.updated},
            {"unmatched_left", s.unmatched_left},
            {"unmatched_right", s.unmatched_right},
            {"edge_count", s.edge_count},
            {"edit_ops", s.edit_ops},
            // The axis is the complement of this ratio.
            {"edit_ratio", s.edge_count == 0 ? 0.0
                                             : static_cast<double>(s.edit_ops) / static_cast<double>(s.edge_count)}}},
          {"html_content",
           {{"source", e.content.raw_html ? "html" : "text"},
            {"distance", e.content.distance},
            {"len_left", e.content.len_left},
            {"len_right", e.content.len_right},
            {"hunks", hunks}}},
          {"visual", visual},
          {"javascript", assets_json(e.javascript)},
          {"css", assets_json(e.css)},
          {"attributes", attrs},
          {"status",
           {{"left", e.status.left},
            {"right", e.status.right},
            {"http_left", opt_int(e.status.http_left)},
            {"http_right", opt_int(e.status.http_right)}}}};
}

ReportEvidence evidence_from(const json& j) {
  ReportEvidence e;
  const json& s = j.at("html_structure");
  e.structure = {s.at("matched").get<std::size_t>(), s.at("updated").get<std::size_t>(),
                 s.at("unmatched_left").get<std::size_t>(), s.at("unmatched_right").get<std::size_t>(),
                 s.at("edge_count").get<std::size_t>(), s.at("edit_ops").get<std::size_t>()};
  const json& c = j.at("html_content");
  e.content.raw_html = c.value("source", "text") == "html";
  e.content.distance = c.at("distance").get<std::size_t>();
  e.content.len_left = c.at("len_left").get<std::size_t>();
  e.content.len_right = c.at("len_right").get<std::size_t>();
  for (const auto& h : c.at("hunks")) {
    e.content.hunks.push_back({op_from(h.at("op").get<std::string>()), h.at("digest").get<std::string>(),
                               h.at("excerpt").get<std::string>()});
  }
  if (const json& v = j.at("visual"); !v.is_null()) {
    VisualEvidence ve;
    ve.left = profile_from(v.at("left"));
    ve.right = profile_from(v.at("right"));
    ve.cross = v.at("cross").get<double>();
    ve.floor_left = v.at("floor_left").get<double>();
    ve.floor_right = v.at("floor_right").get<double>();
    ve.effective = v.at("effective").get<double>();
    e.visual = ve;
  }
  e.javascript = assets_from(j.at("javascript"));
  e.css = assets_from(j.at("css"));
  for (const auto& a : j.at("attributes")) {
    e.attributes.push_back({a.at("tag").get<std::string>(), a.at("name").get<std::string>(),
                            get_opt_value(a.at("left")), get_opt_value(a.at("right"))});
  }
  const json& st = j.at("status");
  e.status.left = st.at("left").get<std::vector<std::string>>();
  e.status.right = st.at("right").get<std::vector<std::string>>();
  e.status.http_left = get_opt_int(st.at("http_left"));
  e.status.http_right = get_opt_int(st.at("http_right"));
  return e;
}

}  // namespace

std::string report_json(const RadarReport& r) {
  json axes = json::object();
  for (Axis a : kAxes) {
    const auto& v = r.axis(a);
    axes[std::string(to_string(a))] = v ? json(round6(*v)) : json(nullptr);
  }
  json j = {{"page_url", r.page_url},
            {"pair_label", r.pair_label},
            {"phase", to_string(r.phase)},
            {"left", config_json(r.left)},
            {"right", config_json(r.right)},
            {"group", r.group ? json(*r.group) : json(nullptr)},
            {"axes", axes},
            {"created_at", r.created_at}};
  if (r.evidence) {
    j["evidence"] = evidence_json(*r.evidence);
  } else {
    json samples = json::object();
    for (Axis a : kAxes) samples[std::string(to_string(a))] = r.samples[static_cast<std::size_t>(a)];
    j["evidence"] = {{"samples", samples}, {"aggregate_of", r.aggregate_of}};
  }
  return j.dump(2) + "\n";
}

RadarReport parse_report_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    RadarReport r;
    r.page_url = j.at("page_url").get<std::string>();
    r.pair_label = j.at("pair_label").get<std::string>();
    const auto phase = parse_phase(j.at("phase").get<std::string>());
    if (!phase) throw Error(ErrorCode::SchemaViolation, "phase");
    r.phase = *phase;
    r.left = config_from(j.at("left"));
    r.right = config_from(j.at("right"));
    if (!j.at("group").is_null()) r.group = j.at("group").get<std::string>();
    for (Axis a : kAxes) {
      const json& v = j.at("axes").at(std::string(to_string(a)));
      if (!v.is_null()) {
        const double x = v.get<double>();
        if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::SchemaViolation, "axes." + std::string(to_string(a)));
        r.axis(a) = x;
      }
    }
    r.created_at = j.at("created_at").get<std::string>();
    const json& ev = j.at("evidence");
    if (ev.contains("samples")) {
      for (Axis a : kAxes) r.samples[static_cast<std::size_t>(a)] = ev.at("samples").at(std::string(to_string(a))).get<std::size_t>();
      r.aggregate_of = ev.at("aggregate_of").get<std::size_t>();
    } else {
      r.evidence = evidence_from(ev);
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("report: ") + e.what());
  }
}

void write_report(const RadarReport& r, const std::filesystem::path& path) {
  write_file_atomic(path, report_json(r));
}

RadarReport read_report(const std::filesystem::path& path) { return parse_report_json(read_file(path)); }

// ---- SVG -----------------------------------------------------------------

namespace {

constexpr double kCenter = 200.0;
constexpr double kRadius = 150.0;
constexpr std::array<std::string_view, 3> kPalette = {"#1f77b4", "#d62728", "#2ca02c"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::pair<double, double> vertex(std::size_t axis, double r) {
  const double angle = (-90.0 + 72.0 * static_cast<double>(axis)) * std::numbers::pi / 180.0;
  return {kCenter + r * std::cos(angle), kCenter + r * std::sin(angle)};
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string ring(double r) {
  std::string pts;
  for (std::size_t i = 0; i < kAxes.size(); ++i) {
    auto [x, y] = vertex(i, r);
    if (!pts.empty()) pts += ' ';
    pts += fmt(x) + "," + fmt(y);
  }
  return pts;
}

}  // namespace

std::string radar_svg(const std::vector<RadarReport>& reports) {
  if (reports.empty() || reports.size() > kPalette.size()) {
    throw Error(ErrorCode::InvalidArgument, "radar needs 1 to 3 reports");
  }
  for (const auto& r : reports) {
    if (canonicalize_url(r.page_url) != canonicalize_url(reports.front().page_url)) {
      throw Error(ErrorCode::InvalidArgument, "reports for different pages");
    }
  }
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n";
  svg += "<rect width=\"400\" height=\"400\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"200\" y=\"16\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
         xml_escape(reports.front().page_url) + "</text>\n";
  svg += "<g fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (int k = 1; k <= 4; ++k) svg += "<polygon points=\"" + ring(kRadius * k / 4.0) + "\"/>\n";
  for (std::size_t i = 0; i < kAxes.size(); ++i) {
    auto [x, y] = vertex(i, kRadius);
    svg += "<line x1=\"" + fmt(kCenter) + "\" y1=\"" + fmt(kCenter) + "\" x2=\"" + fmt(x) + "\" y2=\"" + fmt(y) + "\"/>\n";
  }
  svg += "</g>\n<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
  for (std::size_t i = 0; i < kAxes.size(); ++i) {
    auto [x, y] = vertex(i, kRadius + 18.0);
    const char* anchor = x < kCenter - 1.0 ? "end" : x > kCenter + 1.0 ? "start" : "middle";
    svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y + 4.0) + "\" text-anchor=\"" + anchor + "\">" +
           std::string(axis_title(kAxes[i])) + "</text>\n";
  }
  svg += "</g>\n";
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    const std::string color(kPalette[k]);
    std::string pts;
    std::string markers;
    for (std::size_t i = 0; i < kAxes.size(); ++i) {
      const auto& v = r.axes[i];
      const double score = v ? std::clamp(*v, 0.0, 1.0) : 0.0;
      auto [x, y] = vertex(i, kRadius * score);
      if (!pts.empty()) pts += ' ';
      pts += fmt(x) + "," + fmt(y);
      if (!v) {
        markers += "<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"4\" fill=\"#ffffff\" stroke=\"" + color +
                   "\" stroke-width=\"1.5\"/>\n";
      }
    }
    svg += "<polygon points=\"" + pts + "\" fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += markers;
  }
  svg += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const double y = 360.0 + 14.0 * static_cast<double>(k);
    svg += "<rect x=\"12\" y=\"" + fmt(y - 9.0) + "\" width=\"10\" height=\"10\" fill=\"" + std::string(kPalette[k]) + "\"/>\n";
    svg += "<text x=\"28\" y=\"" + fmt(y) + "\">" + xml_escape(reports[k].pair_label) + "</text>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

void emit_radar_svg(const std::vector<RadarReport>& reports, const std::filesystem::path& out) {
  write_file_atomic(out, radar_svg(reports));
}

RadarReport aggregate_reports(const std::vector<RadarReport>& reports, const std::string& group_key) {
  if (reports.empty()) throw Error(ErrorCode::EmptyInput, "no reports for group " + group_key);
  if (reports.size() == 1) {
    RadarReport only = reports.front();
    return only;
  }
  RadarReport out;
  const RadarReport& first = reports.front();
  out.phase = first.phase;
  out.page_url = first.page_url;
  out.left = first.left;
  out.right = first.right;
  out.group = group_key;
  out.pair_label = group_key;
  std::array<double, 5> sum{};
  for (const auto& r : reports) {
    if (r.phase != out.phase) {
      throw Error(ErrorCode::PhaseMismatch, std::string(to_string(r.phase)) + " in group " + group_key);
    }
    if (canonicalize_url(r.page_url) != canonicalize_url(out.page_url)) out.page_url = "*";
    if (!(r.left == out.left)) out.left = BrowserConfig{"*", out.left.ua_mode, "*"};
    if (!(r.right == out.right)) out.right = BrowserConfig{"*", out.right.ua_mode, "*"};
    out.created_at = std::max(out.created_at, r.created_at);
    const std::size_t weight = r.evidence ? 1 : 0;
    for (std::size_t i = 0; i < kAxes.size(); ++i) {
      if (!r.axes[i]) continue;
      // Aggregates of aggregates weigh each input by its sample count.
      const std::size_t n = weight ? 1 : std::max<std::size_t>(1, r.samples[i]);
      sum[i] += *r.axes[i] * static_cast<double>(n);
      out.samples[i] += n;
    }
    out.aggregate_of += r.evidence ? 1 : std::max<std::size_t>(1, r.aggregate_of);
  }
  for (std::size_t i = 0; i < kAxes.size(); ++i) {
    if (out.samples[i] > 0) out.axes[i] = sum[i] / static_cast<double>(out.samples[i]);
  }
  return out;
}

}  // namespace uaradar
