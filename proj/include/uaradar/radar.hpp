#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uaradar/assetdiff.hpp"
#include "uaradar/backbone.hpp"
#include "uaradar/snapshot.hpp"
#include "uaradar/textdiff.hpp"
#include "uaradar/visualdiff.hpp"

namespace uaradar {

enum class Axis { html_structure, html_content, visual, javascript, css };

// Display and serialization order.
inline constexpr std::array<Axis, 5> kAxes = {Axis::html_structure, Axis::html_content, Axis::visual,
                                              Axis::javascript, Axis::css};

std::string_view to_string(Axis a) noexcept;
std::string_view axis_title(Axis a) noexcept;  // "HTML structure", ...

struct StructureEvidence {
  std::size_t matched = 0;
  std::size_t updated = 0;
  std::size_t unmatched_left = 0;
  std::size_t unmatched_right = 0;
  std::size_t edge_count = 0;
  std::size_t edit_ops = 0;
};

struct TextHunk {
  DiffOp op = DiffOp::insert;  // insert: right only, remove: left only
  std::string digest;          // of the hunk text; independent of op
  std::string excerpt;         // first characters of the hunk
};

struct ContentEvidence {
  bool raw_html = false;  // serialized stable DOM instead of stable text
  std::size_t distance = 0;
  std::size_t len_left = 0;
  std::size_t len_right = 0;
  std::vector<TextHunk> hunks;
};

struct VisualEvidence {
  ContourProfile left;
  ContourProfile right;
  double cross = 0.0;  // S_raw between the two profiles
  double floor_left = 0.0;
  double floor_right = 0.0;
  double effective = 0.0;
};

struct AssetEvidence {
  std::size_t ops = 0;
  std::size_t units = 0;
  bool unmatched_charged = false;
  std::vector<AssetFileDiff> files;
};

// Watched attribute that differs between matched elements, or belongs to an
// element present on one side only.
struct AttributeChange {
  std::string tag;
  std::string name;
  std::optional<std::string> left;
  std::optional<std::string> right;
};

// Attribute names recorded in AttributeChange evidence.
inline constexpr std::array<std::string_view, 6> kWatchedAttributes = {
    "disabled", "height", "inactive", "src", "style", "width"};

// Error-page and bot-check markers found in a side's stable text, plus the
// recorded HTTP status.
struct StatusEvidence {
  std::vector<std::string> left;
  std::vector<std::string> right;
  std::optional<int> http_left;
  std::optional<int> http_right;
};

struct ReportEvidence {
  StructureEvidence structure;
  ContentEvidence content;
  std::optional<VisualEvidence> visual;
  AssetEvidence javascript;
  AssetEvidence css;
  std::vector<AttributeChange> attributes;
  StatusEvidence status;
};

struct RadarReport {
  std::string page_url;
  std::string pair_label;
  Phase phase = Phase::post_js;
  BrowserConfig left;
  BrowserConfig right;
  std::optional<std::string> group;
  std::array<std::optional<double>, 5> axes{};  // kAxes order
  std::optional<ReportEvidence> evidence;       // absent on aggregates
  std::array<std::size_t, 5> samples{};         // aggregates: non-null inputs per axis
  std::size_t aggregate_of = 0;                 // aggregates: number of inputs
  std::string created_at;

  std::optional<double>& axis(Axis a) { return axes[static_cast<std::size_t>(a)]; }
  const std::optional<double>& axis(Axis a) const { return axes[static_cast<std::size_t>(a)]; }
};

// Markers ("403", "captcha", "error", "forbidden") present in the text.
std::vector<std::string> status_markers(std::string_view text, std::optional<int> http_status);

struct CompareOptions {
  std::optional<std::string> pair_label;  // default: concatenated config labels
  bool raw_html_content = false;          // content axis over serialized HTML, not text
};

// Five-axis comparison. Throws PhaseMismatch or PageUrlMismatch.
RadarReport compare_backbones(const Backbone& a, const Backbone& b, const CompareOptions& options = {});

// Axis values recomputed from the evidence block alone.
std::array<std::optional<double>, 5> recompute_axes(const ReportEvidence& e, Phase phase);

// Serialized values: axes rounded to 6 decimals.
double round6(double v);

std::string report_json(const RadarReport& r);
RadarReport parse_report_json(std::string_view text);  // Throws SchemaViolation
void write_report(const RadarReport& r, const std::filesystem::path& path);
RadarReport read_report(const std::filesystem::path& path);

// One closed polygon per report (1 to 3), fixed axis order, legend of pair
// labels, hollow markers for null axes. Throws InvalidArgument.
std::string radar_svg(const std::vector<RadarReport>& reports);
void emit_radar_svg(const std::vector<RadarReport>& reports, const std::filesystem::path& out);

// Per-axis mean over non-null values. Throws EmptyInput or PhaseMismatch.
RadarReport aggregate_reports(const std::vector<RadarReport>& reports, const std::string& group_key);

}  // namespace uaradar
