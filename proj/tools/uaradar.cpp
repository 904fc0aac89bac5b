// uaradar command-line front end.

#include <fnmatch.h>

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uaradar/backbone.hpp"
#include "uaradar/batch.hpp"
#include "uaradar/error.hpp"
#include "uaradar/impact.hpp"
#include "uaradar/io.hpp"
#include "uaradar/radar.hpp"
#include "uaradar/snapshot.hpp"
#include "uaradar/url.hpp"

namespace fs = std::filesystem;
using namespace uaradar;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

// Wildcards are honoured in the final path component only.
std::vector<fs::path> expand(const std::vector<std::string>& patterns) {
  std::vector<fs::path> out;
  for (const std::string& pattern : patterns) {
    const fs::path p(pattern);
    const std::string name = p.filename().string();
    if (name.find_first_of("*?[") == std::string::npos) {
      out.push_back(p);
      continue;
    }
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    std::vector<fs::path> matches;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir, ec)) {
      if (e.is_regular_file() && fnmatch(name.c_str(), e.path().filename().c_str(), 0) == 0) matches.push_back(e.path());
    }
    std::sort(matches.begin(), matches.end());
    out.insert(out.end(), matches.begin(), matches.end());
  }
  return out;
}

int report_error(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    std::cerr << "uaradar: " << to_string(err->code()) << ": " << err->detail() << "\n";
    return err->code() == ErrorCode::InvalidArgument ? kUsage : kFailure;
  }
  std::cerr << "uaradar: " << e.what() << "\n";
  return kFailure;
}

int cmd_validate(const std::vector<std::string>& dirs) {
  int rc = kOk;
  for (const std::string& d : dirs) {
    try {
      const Snapshot s = load_snapshot(d);
      std::cout << "ok " << d << " (" << s.resources.size() << " resources)\n";
      for (const std::string& w : s.warnings) std::cout << "  warning: " << w << "\n";
    } catch (const Error& e) {
      std::cout << "invalid " << d << ": " << to_string(e.code()) << ": " << e.detail() << "\n";
      rc = kFailure;
    }
  }
  return rc;
}

int cmd_backbone(const std::string& v1, const std::string& v2, const std::string& out) {
  const Backbone b = extract_backbone(load_snapshot(v1), load_snapshot(v2));
  save_backbone(b, out);
  std::cout << "backbone " << out << ": " << b.stable_dom.size() << " nodes, " << b.pruned_nodes << " pruned, "
            << b.stable_resources.size() << " stable resources, " << b.volatile_resources.size() << " volatile\n";
  return kOk;
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& out, const std::string& svg,
                const CompareOptions& options) {
  const RadarReport r = compare_backbones(load_backbone(a), load_backbone(b), options);
  write_report(r, out);
  if (!svg.empty()) emit_radar_svg({r}, svg);
  for (Axis axis : kAxes) {
    const auto& v = r.axis(axis);
    std::cout << to_string(axis) << " ";
    if (v) {
      std::cout << std::fixed << std::setprecision(6) << round6(*v) << "\n";
    } else {
      std::cout << "null\n";
    }
  }
  return kOk;
}

int cmd_classify(const std::vector<std::string>& patterns, const std::string& out, const std::string& csv) {
  const auto files = expand(patterns);
  if (files.empty()) throw Error(ErrorCode::EmptyInput, "no report files matched");
  std::map<std::string, std::vector<RadarReport>> by_page;
  std::vector<std::string> order;
  for (const fs::path& f : files) {
    RadarReport r = read_report(f);
    const std::string key = canonicalize_url(r.page_url);
    if (!by_page.contains(key)) order.push_back(key);
    by_page[key].push_back(std::move(r));
  }
  std::vector<ImpactReport> impacts;
  for (const std::string& key : order) impacts.push_back(classify_reports(by_page[key]));
  write_file_atomic(out, impact_list_json(impacts));
  if (!csv.empty()) write_file_atomic(csv, impact_summary_csv(impacts));
  for (const ImpactReport& i : impacts) std::cout << i.page_url << " " << to_string(i.label) << " " << to_string(i.severity) << "\n";
  return kOk;
}

int cmd_batch(const std::string& plan_path, const std::optional<std::string>& workers, const RunOptions& options) {
  const BatchPlan plan = load_plan(plan_path);
  const std::size_t n = resolve_workers(workers, plan);
  const BatchSummary s = run_batch(plan, n, options);
  for (const EntryResult& e : s.entries) {
    std::cout << (e.errors.empty() ? "ok " : "failed ") << e.id << " (" << e.reports.size() << " reports)\n";
    for (const std::string& msg : e.errors) std::cerr << "  " << msg << "\n";
  }
  std::cout << s.entries.size() - s.failed << "/" << s.entries.size() << " entries ok, output in "
            << plan.output_dir.string() << "\n";
  return s.exit_code();
}

int cmd_aggregate(const std::string& group, const std::vector<std::string>& patterns, const std::string& out,
                  const std::string& phase_name, const std::string& pair) {
  const auto phase = parse_phase(phase_name);
  if (!phase) throw Error(ErrorCode::InvalidArgument, "--phase must be pre_js or post_js");
  std::vector<RadarReport> selected;
  for (const fs::path& f : expand(patterns)) {
    RadarReport r = read_report(f);
    if (r.group != group || r.phase != *phase || !r.evidence) continue;
    if (!pair.empty() && r.pair_label != pair) continue;
    selected.push_back(std::move(r));
  }
  RadarReport agg = aggregate_reports(selected, group);
  if (selected.size() == 1) {
    agg.evidence.reset();
    agg.group = group;
    for (std::size_t i = 0; i < kAxes.size(); ++i) agg.samples[i] = agg.axes[i] ? 1 : 0;
    agg.aggregate_of = 1;
  }
  write_report(agg, out);
  std::cout << group << ": " << agg.aggregate_of << " reports\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Similarity radar and impact classifier for captured web pages"};
  app.require_subcommand(1);

  std::vector<std::string> validate_dirs;
  auto* validate = app.add_subcommand("validate", "Check snapshot directories against the manifest schema");
  validate->add_option("dir", validate_dirs, "Snapshot directory")->required();

  std::string v1, v2, backbone_out;
  auto* backbone = app.add_subcommand("backbone", "Extract the stable backbone of two visits");
  backbone->add_option("v1", v1, "First visit")->required();
  backbone->add_option("v2", v2, "Second visit")->required();
  backbone->add_option("-o,--out", backbone_out, "Output directory")->required();

  std::string cmp_a, cmp_b, cmp_out, cmp_svg, cmp_label;
  bool raw_html = false;
  auto* compare = app.add_subcommand("compare", "Five-axis comparison of two backbones or snapshots");
  compare->add_option("a", cmp_a, "Left backbone or snapshot directory")->required();
  compare->add_option("b", cmp_b, "Right backbone or snapshot directory")->required();
  compare->add_option("-o,--out", cmp_out, "Report JSON path")->required();
  compare->add_option("--svg", cmp_svg, "Also write a radar chart");
  compare->add_option("--label", cmp_label, "Pair label (default: both config labels)");
  compare->add_flag("--raw-html-content", raw_html, "Content axis over serialized HTML");

  std::vector<std::string> cls_reports;
  std::string cls_out, cls_csv;
  auto* classify = app.add_subcommand("classify", "Impact classification over radar reports");
  classify->add_option("--reports", cls_reports, "Report files or glob")->required();
  classify->add_option("-o,--out", cls_out, "Impact JSON path")->required();
  classify->add_option("--csv", cls_csv, "Summary CSV path");

  std::string plan_path;
  std::optional<std::string> workers;
  RunOptions run;
  auto* batch = app.add_subcommand("batch", "Run a corpus plan");
  batch->add_option("--plan", plan_path, "Plan JSON")->required();
  batch->add_option("--workers", workers, "Worker threads (default: UARADAR_WORKERS, plan, 1)");
  batch->add_flag("--strict-entry", run.strict_entry, "Discard an entry on any failure");
  batch->add_flag("--svg", run.svg, "Write radar charts");
  batch->add_flag("--raw-html-content", run.raw_html_content, "Content axis over serialized HTML");

  std::string agg_group, agg_out, agg_phase = "post_js", agg_pair;
  std::vector<std::string> agg_reports;
  auto* aggregate = app.add_subcommand("aggregate", "Average the reports of one group");
  aggregate->add_option("--group", agg_group, "Group tag")->required();
  aggregate->add_option("--reports", agg_reports, "Report files or glob")->required();
  aggregate->add_option("-o,--out", agg_out, "Aggregate JSON path")->required();
  aggregate->add_option("--phase", agg_phase, "pre_js or post_js");
  aggregate->add_option("--pair", agg_pair, "Only this pair label");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(validate_dirs);
    if (*backbone) return cmd_backbone(v1, v2, backbone_out);
    if (*compare) {
      CompareOptions options;
      if (!cmp_label.empty()) options.pair_label = cmp_label;
      options.raw_html_content = raw_html;
      return cmd_compare(cmp_a, cmp_b, cmp_out, cmp_svg, options);
    }
    if (*classify) return cmd_classify(cls_reports, cls_out, cls_csv);
    if (*batch) return cmd_batch(plan_path, workers, run);
    if (*aggregate) return cmd_aggregate(agg_group, agg_reports, agg_out, agg_phase, agg_pair);
  } catch (const std::exception& e) {
    return report_error(e);
  }
  return kUsage;
}
