#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uaradar/backbone.hpp"
#include "uaradar/impact.hpp"
#include "uaradar/radar.hpp"

namespace uaradar {

// Snapshot directories of one page, keyed by config label then phase; a
// complete (config, phase) lists exactly two visit directories.
struct PlanEntry {
  std::string page_url;
  std::string id;  // output directory name
  std::optional<std::string> group;
  std::map<std::string, std::map<Phase, std::vector<std::filesystem::path>>> visits;
};

struct BatchPlan {
  std::vector<PlanEntry> entries;
  std::vector<std::pair<std::string, std::string>> pairs;  // empty: default_pairs()
  std::optional<std::size_t> workers;
  std::filesystem::path output_dir;
};

// Throws SchemaViolation. Relative paths resolve against base_dir.
BatchPlan parse_plan(std::string_view json_text, const std::filesystem::path& base_dir);
BatchPlan load_plan(const std::filesystem::path& path);

// Standard/None pairs per engine in label order, then every pair of standard
// configs. For C, CN, F, FN, W, WN: CCN, FFN, WWN, CF, CW, FW.
std::vector<std::pair<std::string, std::string>> default_pairs(const std::map<std::string, BrowserConfig>& configs);

struct EntryResult {
  std::string page_url;
  std::string id;
  std::optional<std::string> group;
  std::vector<RadarReport> reports;  // pair order, pre_js before post_js
  std::optional<ImpactReport> impact;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
};

struct RunOptions {
  bool strict_entry = false;  // any error discards the whole entry
  bool svg = false;
  bool raw_html_content = false;
};

// Backbones per (config, phase), one report per pair and common phase, then
// the impact classification. Never throws for data errors; they land in
// EntryResult::errors.
EntryResult run_entry(const PlanEntry& entry, const std::vector<std::pair<std::string, std::string>>& pairs,
                      const RunOptions& options = {});

// One report per phase both configs declare; a phase declared by one side
// only is skipped with a warning. Throws IncompleteEntry when a declared
// (config, phase) does not list two visits.
std::vector<RadarReport> run_compare(const PlanEntry& entry, const std::string& left, const std::string& right,
                                     const RunOptions& options = {}, std::vector<std::string>* warnings = nullptr);

// Impact over a page's reports: post_js when present, else pre_js.
// Standard-vs-None and standard-vs-standard pairs are told apart by ua_mode.
// Throws ArityMismatch when either group is empty.
ImpactReport classify_reports(const std::vector<RadarReport>& reports);

struct BatchSummary {
  std::vector<EntryResult> entries;  // plan order
  std::size_t failed = 0;
  int exit_code() const { return failed == 0 ? 0 : 1; }
};

// Entries in parallel over `workers` threads, results in plan order. Writes
// <out>/reports/<id>/<pair>.<phase>.json, <out>/impact/<id>.json,
// <out>/summary.csv, <out>/aggregates/<group>.<pair>.<phase>.json and
// <out>/errors.log.
BatchSummary run_batch(const BatchPlan& plan, std::size_t workers, const RunOptions& options = {});

// Worker count: explicit flag, then UARADAR_WORKERS, then the plan, then 1.
// Throws InvalidArgument for a non-positive or malformed value.
std::size_t resolve_workers(std::optional<std::string> flag, const BatchPlan& plan);

}  // namespace uaradar
