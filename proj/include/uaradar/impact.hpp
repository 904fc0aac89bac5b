#pragma once

#include <compare>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uaradar/radar.hpp"

namespace uaradar {

enum class AtomCategory { css_property, html_attribute, text_signal, status_signal };

std::string_view to_string(AtomCategory c) noexcept;
std::optional<AtomCategory> parse_atom_category(std::string_view s) noexcept;

// One piece of change evidence. context is an element tag, a file url,
// "inline" for style attributes or "document" for page-level signals.
struct Atom {
  AtomCategory category = AtomCategory::css_property;
  std::string name;
  std::string context;

  friend auto operator<=>(const Atom&, const Atom&) = default;
  friend bool operator==(const Atom&, const Atom&) = default;
};

// Sorted, duplicate-free atom set.
class ChangeDelta {
 public:
  ChangeDelta() = default;
  explicit ChangeDelta(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const& noexcept { return atoms_; }
  std::vector<Atom> atoms() && noexcept { return std::move(atoms_); }
  bool empty() const noexcept { return atoms_.empty(); }
  bool contains(const Atom& a) const;

  friend bool operator==(const ChangeDelta&, const ChangeDelta&) = default;

 private:
  std::vector<Atom> atoms_;
};

enum class ImpactLabel {
  margin_collapsing_fail,
  soft_wrap_fail,
  unnecessary_blank_lines,
  inline_css_change,
  lazy_loading_fail,
  displaced_iframe,
  disabled_component,
  browser_not_identified,
  content_restriction,
  no_impact,
  no_pattern,
};

enum class Severity { IRRITANT, MODERATE, SEVERE, UNUSABLE, NONE };

inline constexpr std::size_t kImpactLabelCount = 11;

std::string_view to_string(ImpactLabel l) noexcept;
std::string_view to_string(Severity s) noexcept;
std::optional<ImpactLabel> parse_impact_label(std::string_view s) noexcept;
Severity severity_of(ImpactLabel l) noexcept;

struct ImpactReport {
  std::string page_url;
  ImpactLabel label = ImpactLabel::no_pattern;
  Severity severity = Severity::NONE;
  std::vector<Atom> matched_atoms;

  friend bool operator==(const ImpactReport&, const ImpactReport&) = default;
};

// Atoms from a report's evidence. Throws MissingEvidence for aggregates.
ChangeDelta extract_delta(const RadarReport& r);

// std_none: standard-vs-None pair deltas; std_std: standard-vs-standard.
// Throws ArityMismatch when either list is empty.
ImpactReport classify_impact(const std::vector<ChangeDelta>& std_none, const std::vector<ChangeDelta>& std_std,
                             std::string page_url = {});

std::string impact_json(const ImpactReport& r);
std::string impact_list_json(const std::vector<ImpactReport>& reports);
ImpactReport parse_impact_json(std::string_view text);  // Throws SchemaViolation

// "url,label,severity" rows, one per report, in input order.
std::string impact_summary_csv(const std::vector<ImpactReport>& reports);

}  // namespace uaradar
