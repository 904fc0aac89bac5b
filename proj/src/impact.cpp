#include "uaradar/impact.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

#include "uaradar/asset_parsers.hpp"
#include "uaradar/error.hpp"
#include "uaradar/text.hpp"

namespace uaradar {

using json = nlohmann::ordered_json;

std::string_view to_string(AtomCategory c) noexcept {
  switch (c) {
    case AtomCategory::css_property: return "css_property";
    case AtomCategory::html_attribute: return "html_attribute";
    case AtomCategory::text_signal: return "text_signal";
    case AtomCategory::status_signal: return "status_signal";
  }
  return "?";
}

std::optional<AtomCategory> parse_atom_category(std::string_view s) noexcept {
  for (AtomCategory c : {AtomCategory::css_property, AtomCategory::html_attribute, AtomCategory::text_signal,
                         AtomCategory::status_signal}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

ChangeDelta::ChangeDelta(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end());
  atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
}

bool ChangeDelta::contains(const Atom& a) const { return std::binary_search(atoms_.begin(), atoms_.end(), a); }

std::string_view to_string(ImpactLabel l) noexcept {
  switch (l) {
    case ImpactLabel::margin_collapsing_fail: return "margin_collapsing_fail";
    case ImpactLabel::soft_wrap_fail: return "soft_wrap_fail";
    case ImpactLabel::unnecessary_blank_lines: return "unnecessary_blank_lines";
    case ImpactLabel::inline_css_change: return "inline_css_change";
    case ImpactLabel::lazy_loading_fail: return "lazy_loading_fail";
    case ImpactLabel::displaced_iframe: return "displaced_iframe";
    case ImpactLabel::disabled_component: return "disabled_component";
    case ImpactLabel::browser_not_identified: return "browser_not_identified";
    case ImpactLabel::content_restriction: return "content_restriction";
    case ImpactLabel::no_impact: return "no_impact";
    case ImpactLabel::no_pattern: return "no_pattern";
  }
  return "?";
}

std::string_view to_string(Severity s) noexcept {
  switch (s) {
    case Severity::IRRITANT: return "IRRITANT";
    case Severity::MODERATE: return "MODERATE";
    case Severity::SEVERE: return "SEVERE";
    case Severity::UNUSABLE: return "UNUSABLE";
    case Severity::NONE: return "NONE";
  }
  return "?";
}

std::optional<ImpactLabel> parse_impact_label(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kImpactLabelCount; ++i) {
    const auto l = static_cast<ImpactLabel>(i);
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

Severity severity_of(ImpactLabel l) noexcept {
  switch (l) {
    case ImpactLabel::margin_collapsing_fail:
    case ImpactLabel::soft_wrap_fail:
    case ImpactLabel::unnecessary_blank_lines:
    case ImpactLabel::lazy_loading_fail:
      return Severity::SEVERE;
    case ImpactLabel::inline_css_change:
    case ImpactLabel::displaced_iframe:
      return Severity::MODERATE;
    case ImpactLabel::disabled_component:
    case ImpactLabel::browser_not_identified:
    case ImpactLabel::content_restriction:
      return Severity::UNUSABLE;
    case ImpactLabel::no_impact:
      return Severity::IRRITANT;
    case ImpactLabel::no_pattern:
      return Severity::NONE;
  }
  return Severity::NONE;
}

// ---- extraction ----------------------------------------------------------

namespace {

// "margin-top", "-webkit-box-flex"
bool looks_like_css_property(std::string_view s) {
  std::size_t i = s.starts_with('-') ? 1 : 0;
  bool hyphen = false;
  bool prev_alpha = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c >= 'a' && c <= 'z') {
      prev_alpha = true;
    } else if (c == '-' && prev_alpha) {
      hyphen = true;
      prev_alpha = false;
    } else {
      return false;
    }
  }
  return hyphen && prev_alpha;
}

// Script-side spellings of the properties the classifier inspects.
std::optional<std::string> camel_property(std::string_view s) {
  static constexpr std::pair<std::string_view, std::string_view> kMap[] = {
      {"marginTop", "margin-top"},           {"marginBottom", "margin-bottom"},
      {"whiteSpace", "white-space"},         {"pageBreakBefore", "page-break-before"},
      {"pageBreakAfter", "page-break-after"},
  };
  for (const auto& [camel, css] : kMap) {
    if (s == camel) return std::string(css);
  }
  return std::nullopt;
}

// "prop: value" -> atom name; white-space keeps its value so wrapping modes
// can be told apart.
std::string declaration_atom(std::string_view decl) {
  const auto colon = decl.find(':');
  const std::string_view prop = decl.substr(0, colon);
  if (prop == "white-space" && colon != std::string_view::npos) {
    std::string_view value = decl.substr(colon + 1);
    while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
    const auto end = value.find_first_of(" !");
    return "white-space:" + std::string(value.substr(0, end));
  }
  return std::string(prop);
}

std::set<std::string> inline_declarations(const std::optional<std::string>& style) {
  std::set<std::string> out;
  if (!style) return out;
  const SyntaxTree t = parse_css("x{" + *style + "}");
  for (const SyntaxNode& n : t.nodes()) {
    if (n.kind == "decl") out.insert(n.label);
  }
  return out;
}

std::string file_id(const AssetFileDiff& f) {
  if (f.left_url.empty()) return f.right_url;
  if (f.right_url.empty()) return f.left_url;
  return std::min(f.left_url, f.right_url);
}

bool is_pseudo_state(std::string_view selector, std::string_view state) {
  const std::string needle = ":" + std::string(state);
  for (auto p = selector.find(needle); p != std::string_view::npos; p = selector.find(needle, p + 1)) {
    const std::size_t end = p + needle.size();
    if (end >= selector.size() || !(std::isalnum(static_cast<unsigned char>(selector[end])) || selector[end] == '-')) {
      return true;
    }
  }
  return false;
}

}  // namespace

ChangeDelta extract_delta(const RadarReport& r) {
  if (!r.evidence) throw Error(ErrorCode::MissingEvidence, r.page_url + " " + r.pair_label);
  const ReportEvidence& e = *r.evidence;
  std::vector<Atom> atoms;
  auto add = [&](AtomCategory c, std::string name, std::string context) {
    atoms.push_back({c, std::move(name), std::move(context)});
  };

  for (const AssetFileDiff& f : e.css.files) {
    const std::string id = file_id(f);
    for (const std::string& d : f.changed_declarations) add(AtomCategory::css_property, declaration_atom(d), id);
    for (const std::string& s : f.changed_selectors) {
      for (std::string_view state : {"disabled", "inactive"}) {
        if (is_pseudo_state(s, state)) add(AtomCategory::html_attribute, std::string(state), id);
      }
    }
  }
  for (const AssetFileDiff& f : e.javascript.files) {
    const std::string id = file_id(f);
    for (const std::string& t : f.changed_tokens) {
      if (looks_like_css_property(t)) {
        add(AtomCategory::css_property, t, id);
      } else if (auto p = camel_property(t)) {
        add(AtomCategory::css_property, *p, id);
      }
    }
  }

  for (const AttributeChange& c : e.attributes) {
    if (c.name == "style") {
      const auto left = inline_declarations(c.left);
      const auto right = inline_declarations(c.right);
      std::vector<std::string> diff;
      std::set_symmetric_difference(left.begin(), left.end(), right.begin(), right.end(), std::back_inserter(diff));
      for (const std::string& d : diff) add(AtomCategory::css_property, declaration_atom(d), "inline");
    } else if (c.name == "src" && c.tag == "img") {
      add(AtomCategory::html_attribute, "src", "img");
    } else if ((c.name == "width" || c.name == "height") && c.tag == "iframe") {
      add(AtomCategory::html_attribute, c.name, "iframe");
    } else if (c.name == "disabled" || c.name == "inactive") {
      add(AtomCategory::html_attribute, c.name, c.tag);
    }
  }

  // Markers present on one side only; a page that always says "error" is
  // not an error page for this comparison.
  std::vector<std::string> markers;
  std::set_symmetric_difference(e.status.left.begin(), e.status.left.end(), e.status.right.begin(),
                                e.status.right.end(), std::back_inserter(markers));
  for (std::string& m : markers) add(AtomCategory::status_signal, std::move(m), "document");

  for (const TextHunk& h : e.content.hunks) add(AtomCategory::text_signal, h.digest, "document");
  return ChangeDelta(std::move(atoms));
}

// ---- classification ------------------------------------------------------

namespace {

bool wrapping_white_space(std::string_view name) {
  if (!name.starts_with("white-space:")) return false;
  const std::string_view v = name.substr(12);
  return v == "wrap" || v == "normal" || v == "pre-wrap" || v == "pre-line" || v == "break-spaces";
}

using AtomTest = bool (*)(const Atom&);

struct Rule {
  ImpactLabel label;
  AtomTest test;
};

bool css(const Atom& a) { return a.category == AtomCategory::css_property; }
bool attr(const Atom& a) { return a.category == AtomCategory::html_attribute; }

// Branch order of the classifier; first match wins.
constexpr Rule kRules[] = {
    {ImpactLabel::margin_collapsing_fail,
     [](const Atom& a) { return css(a) && (a.name == "margin-top" || a.name == "margin-bottom"); }},
    {ImpactLabel::soft_wrap_fail, [](const Atom& a) { return css(a) && wrapping_white_space(a.name); }},
    {ImpactLabel::unnecessary_blank_lines,
     [](const Atom& a) { return css(a) && (a.name == "page-break-before" || a.name == "page-break-after"); }},
    {ImpactLabel::inline_css_change, [](const Atom& a) { return css(a) && a.context == "inline"; }},
    {ImpactLabel::lazy_loading_fail, [](const Atom& a) { return attr(a) && a.name == "src" && a.context == "img"; }},
    {ImpactLabel::displaced_iframe,
     [](const Atom& a) { return attr(a) && a.context == "iframe" && (a.name == "width" || a.name == "height"); }},
    {ImpactLabel::disabled_component,
     [](const Atom& a) { return attr(a) && (a.name == "disabled" || a.name == "inactive"); }},
    {ImpactLabel::browser_not_identified,
     [](const Atom& a) {
       return a.category == AtomCategory::status_signal &&
              (a.name == "captcha" || a.name == "403" || a.name == "error" || a.name == "forbidden");
     }},
};

bool all_equal(const std::vector<ChangeDelta>& ds) {
  return std::all_of(ds.begin(), ds.end(), [&](const ChangeDelta& d) { return d == ds.front(); });
}

bool pairwise_distinct(const std::vector<ChangeDelta>& ds) {
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = i + 1; j < ds.size(); ++j) {
      if (ds[i] == ds[j]) return false;
    }
  }
  return true;
}

std::vector<ChangeDelta> distinct(std::vector<ChangeDelta> ds) {
  std::sort(ds.begin(), ds.end(), [](const ChangeDelta& a, const ChangeDelta& b) { return a.atoms() < b.atoms(); });
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
  return ds;
}

}  // namespace

ImpactReport classify_impact(const std::vector<ChangeDelta>& std_none, const std::vector<ChangeDelta>& std_std,
                             std::string page_url) {
  if (std_none.empty() || std_std.empty()) {
    throw Error(ErrorCode::ArityMismatch, "std_none=" + std::to_string(std_none.size()) +
                                              " std_std=" + std::to_string(std_std.size()));
  }
  ImpactReport out;
  out.page_url = std::move(page_url);
  auto finish = [&](ImpactLabel l) {
    out.label = l;
    out.severity = severity_of(l);
    return out;
  };

  if (!all_equal(std_none)) {
    return finish(pairwise_distinct(std_none) && pairwise_distinct(std_std) ? ImpactLabel::no_impact
                                                                            : ImpactLabel::no_pattern);
  }
  const ChangeDelta& d = std_none.front();
  for (const Rule& rule : kRules) {
    for (const Atom& a : d.atoms()) {
      if (rule.test(a)) out.matched_atoms.push_back(a);
    }
    if (!out.matched_atoms.empty()) return finish(rule.label);
  }
  if (distinct(std_none) != distinct(std_std)) {
    for (const Atom& a : d.atoms()) {
      const bool seen = std::any_of(std_std.begin(), std_std.end(), [&](const ChangeDelta& s) { return s.contains(a); });
      if (!seen) out.matched_atoms.push_back(a);
    }
    return finish(ImpactLabel::content_restriction);
  }
  return finish(ImpactLabel::no_pattern);
}

// ---- output --------------------------------------------------------------

namespace {

json impact_object(const ImpactReport& r) {
  json atoms = json::array();
  for (const Atom& a : r.matched_atoms) {
    atoms.push_back({{"category", to_string(a.category)}, {"name", a.name}, {"context", a.context}});
  }
  return {{"page_url", r.page_url},
          {"label", to_string(r.label)},
          {"severity", to_string(r.severity)},
          {"matched_atoms", atoms}};
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string impact_json(const ImpactReport& r) { return impact_object(r).dump(2) + "\n"; }

std::string impact_list_json(const std::vector<ImpactReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(impact_object(r));
  return arr.dump(2) + "\n";
}

ImpactReport parse_impact_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    ImpactReport r;
    r.page_url = j.at("page_url").get<std::string>();
    const auto label = parse_impact_label(j.at("label").get<std::string>());
    if (!label) throw Error(ErrorCode::SchemaViolation, "label");
    r.label = *label;
    r.severity = severity_of(r.label);
    if (j.at("severity").get<std::string>() != to_string(r.severity)) {
      throw Error(ErrorCode::SchemaViolation, "severity");
    }
    for (const auto& a : j.at("matched_atoms")) {
      const auto c = parse_atom_category(a.at("category").get<std::string>());
      if (!c) throw Error(ErrorCode::SchemaViolation, "matched_atoms.category");
      r.matched_atoms.push_back({*c, a.at("name").get<std::string>(), a.at("context").get<std::string>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("impact: ") + e.what());
  }
}

std::string impact_summary_csv(const std::vector<ImpactReport>& reports) {
  std::string out = "url,label,severity\n";
  for (const auto& r : reports) {
    out += csv_field(r.page_url) + "," + std::string(to_string(r.label)) + "," + std::string(to_string(r.severity)) +
           "\n";
  }
  return out;
}

}  // namespace uaradar
