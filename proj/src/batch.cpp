#include "uaradar/batch.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <set>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "uaradar/error.hpp"
#include "uaradar/io.hpp"
#include "uaradar/snapshot.hpp"
#include "uaradar/text.hpp"
#include "uaradar/url.hpp"

namespace uaradar {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string file_safe(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out;
}

std::string default_id(std::string_view url) {
  std::string_view rest = url;
  if (const auto p = rest.find("://"); p != std::string_view::npos) rest.remove_prefix(p + 3);
  std::string slug = file_safe(rest.substr(0, 48));
  return slug + "-" + sha256_hex(url).substr(0, 8);
}

std::string describe(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return std::string(to_string(err->code())) + ": " + err->detail();
  }
  return e.what();
}

}  // namespace

BatchPlan parse_plan(std::string_view json_text, const fs::path& base_dir) {
  BatchPlan plan;
  try {
    const json j = json::parse(json_text);
    auto resolve = [&](const std::string& p) {
      const fs::path path(p);
      return path.is_absolute() ? path : base_dir / path;
    };
    plan.output_dir = resolve(j.value("output_dir", std::string("out")));
    if (j.contains("workers") && !j.at("workers").is_null()) {
      const auto w = j.at("workers").get<long long>();
      if (w < 1) throw Error(ErrorCode::SchemaViolation, "workers");
      plan.workers = static_cast<std::size_t>(w);
    }
    if (j.contains("pairs")) {
      for (const auto& p : j.at("pairs")) {
        if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::SchemaViolation, "pairs");
        plan.pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
      }
    }
    std::set<std::string> ids;
    for (const auto& e : j.at("entries")) {
      PlanEntry entry;
      entry.page_url = e.at("page_url").get<std::string>();
      entry.id = e.contains("id") ? e.at("id").get<std::string>() : default_id(entry.page_url);
      if (entry.id.empty() || file_safe(entry.id) != entry.id) throw Error(ErrorCode::SchemaViolation, "entries.id");
      if (!ids.insert(entry.id).second) throw Error(ErrorCode::SchemaViolation, "duplicate entry id " + entry.id);
      if (e.contains("group") && !e.at("group").is_null()) entry.group = e.at("group").get<std::string>();
      for (const auto& [label, phases] : e.at("configs").items()) {
        auto& slot = entry.visits[label];
        for (const auto& [phase_name, dirs] : phases.items()) {
          const auto phase = parse_phase(phase_name);
          if (!phase) throw Error(ErrorCode::SchemaViolation, "phase " + phase_name);
          auto& list = slot[*phase];
          for (const auto& d : dirs) list.push_back(resolve(d.get<std::string>()));
        }
      }
      plan.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("plan: ") + e.what());
  }
  return plan;
}

BatchPlan load_plan(const fs::path& path) {
  return parse_plan(read_file(path), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

std::vector<std::pair<std::string, std::string>> default_pairs(const std::map<std::string, BrowserConfig>& configs) {
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> standard;
  for (const auto& [label, c] : configs) {
    if (c.ua_mode == UaMode::standard) standard.push_back(label);
  }
  for (const std::string& s : standard) {
    for (const auto& [label, c] : configs) {
      if (c.ua_mode == UaMode::none && c.engine_id == configs.at(s).engine_id) out.emplace_back(s, label);
    }
  }
  for (std::size_t i = 0; i < standard.size(); ++i) {
    for (std::size_t j = i + 1; j < standard.size(); ++j) out.emplace_back(standard[i], standard[j]);
  }
  return out;
}

namespace {

// Backbones of one entry, built on first use.
class BackboneCache {
 public:
  explicit BackboneCache(const PlanEntry& entry) : entry_(entry) {}

  bool declares(const std::string& label, Phase phase) const {
    const auto it = entry_.visits.find(label);
    return it != entry_.visits.end() && it->second.contains(phase);
  }

  const Backbone& get(const std::string& label, Phase phase) {
    const auto key = std::make_pair(label, phase);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const auto& dirs = entry_.visits.at(label).at(phase);
    if (dirs.size() != 2) {
      throw Error(ErrorCode::IncompleteEntry, entry_.id + ": config " + label + " phase " +
                                                  std::string(to_string(phase)) + " has " +
                                                  std::to_string(dirs.size()) + " visit(s), needs 2");
    }
    const Snapshot v1 = load_snapshot(dirs[0]);
    const Snapshot v2 = load_snapshot(dirs[1]);
    if (canonicalize_url(v1.page_url) != canonicalize_url(entry_.page_url)) {
      throw Error(ErrorCode::PageUrlMismatch, entry_.id + ": " + v1.page_url + " vs " + entry_.page_url);
    }
    if (v1.phase != phase) {
      throw Error(ErrorCode::PhaseMismatch, entry_.id + ": " + dirs[0].string() + " is " + std::string(to_string(v1.phase)));
    }
    return cache_.emplace(key, extract_backbone(v1, v2)).first->second;
  }

  // Config of the label's first listed visit.
  BrowserConfig config(const std::string& label) {
    for (const auto& [phase, dirs] : entry_.visits.at(label)) {
      if (!dirs.empty()) return load_snapshot(dirs.front()).config;
    }
    throw Error(ErrorCode::IncompleteEntry, entry_.id + ": config " + label + " lists no visits");
  }

 private:
  const PlanEntry& entry_;
  std::map<std::pair<std::string, Phase>, Backbone> cache_;
};

std::vector<RadarReport> compare_in(BackboneCache& cache, const PlanEntry& entry, const std::string& left,
                                    const std::string& right, const RunOptions& options,
                                    std::vector<std::string>* warnings) {
  for (const std::string& label : {left, right}) {
    if (!entry.visits.contains(label)) {
      throw Error(ErrorCode::IncompleteEntry, entry.id + ": config " + label + " not in entry");
    }
  }
  std::vector<RadarReport> out;
  for (Phase phase : {Phase::pre_js, Phase::post_js}) {
    const bool l = cache.declares(left, phase);
    const bool r = cache.declares(right, phase);
    if (!l && !r) continue;
    if (l != r) {
      if (warnings) {
        warnings->push_back(entry.id + ": " + left + right + " " + std::string(to_string(phase)) + " skipped, only " +
                            (l ? left : right) + " has it");
      }
      continue;
    }
    CompareOptions co;
    co.pair_label = left + right;
    co.raw_html_content = options.raw_html_content;
    RadarReport report = compare_backbones(cache.get(left, phase), cache.get(right, phase), co);
    report.group = entry.group;
    out.push_back(std::move(report));
  }
  return out;
}

void write_entry(const EntryResult& r, const fs::path& out_dir) {
  const fs::path dir = out_dir / "reports" / r.id;
  for (const RadarReport& report : r.reports) {
    write_report(report, dir / (file_safe(report.pair_label) + "." + std::string(to_string(report.phase)) + ".json"));
  }
  if (r.impact) write_file_atomic(out_dir / "impact" / (r.id + ".json"), impact_json(*r.impact));
}

void write_svgs(const EntryResult& r, const fs::path& out_dir) {
  for (Phase phase : {Phase::pre_js, Phase::post_js}) {
    std::vector<RadarReport> group;
    for (const RadarReport& report : r.reports) {
      if (report.phase == phase) group.push_back(report);
    }
    // Three pentagons per chart.
    for (std::size_t i = 0; i < group.size(); i += 3) {
      std::vector<RadarReport> chunk(group.begin() + static_cast<std::ptrdiff_t>(i),
                                     group.begin() + static_cast<std::ptrdiff_t>(std::min(group.size(), i + 3)));
      emit_radar_svg(chunk, out_dir / "reports" / r.id /
                                (std::string(to_string(phase)) + "." + std::to_string(i / 3 + 1) + ".svg"));
    }
  }
}

}  // namespace

std::vector<RadarReport> run_compare(const PlanEntry& entry, const std::string& left, const std::string& right,
                                     const RunOptions& options, std::vector<std::string>* warnings) {
  BackboneCache cache(entry);
  return compare_in(cache, entry, left, right, options, warnings);
}

ImpactReport classify_reports(const std::vector<RadarReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::ArityMismatch, "no reports");
  const bool post = std::any_of(reports.begin(), reports.end(), [](const RadarReport& r) { return r.phase == Phase::post_js; });
  const Phase phase = post ? Phase::post_js : Phase::pre_js;
  std::vector<ChangeDelta> std_none;
  std::vector<ChangeDelta> std_std;
  for (const RadarReport& r : reports) {
    if (canonicalize_url(r.page_url) != canonicalize_url(reports.front().page_url)) {
      throw Error(ErrorCode::PageUrlMismatch, r.page_url + " vs " + reports.front().page_url);
    }
    if (r.phase != phase) continue;
    const bool ln = r.left.ua_mode == UaMode::none;
    const bool rn = r.right.ua_mode == UaMode::none;
    if (ln != rn) {
      std_none.push_back(extract_delta(r));
    } else if (!ln) {
      std_std.push_back(extract_delta(r));
    }
  }
  return classify_impact(std_none, std_std, reports.front().page_url);
}

EntryResult run_entry(const PlanEntry& entry, const std::vector<std::pair<std::string, std::string>>& pairs,
                      const RunOptions& options) {
  EntryResult out;
  out.page_url = entry.page_url;
  out.id = entry.id;
  out.group = entry.group;
  BackboneCache cache(entry);
  std::vector<std::pair<std::string, std::string>> chosen = pairs;
  if (chosen.empty()) {
    std::map<std::string, BrowserConfig> configs;
    for (const auto& [label, phases] : entry.visits) {
      try {
        configs.emplace(label, cache.config(label));
      } catch (const std::exception& e) {
        out.errors.push_back(entry.id + ": " + describe(e));
      }
    }
    chosen = default_pairs(configs);
  }
  for (const auto& [left, right] : chosen) {
    if (options.strict_entry && !out.errors.empty()) break;
    try {
      for (RadarReport& r : compare_in(cache, entry, left, right, options, &out.warnings)) out.reports.push_back(std::move(r));
    } catch (const std::exception& e) {
      out.errors.push_back(entry.id + ": " + left + right + ": " + describe(e));
    }
  }
  if (!out.reports.empty() && (out.errors.empty() || !options.strict_entry)) {
    try {
      out.impact = classify_reports(out.reports);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ArityMismatch) throw;
      out.warnings.push_back(entry.id + ": impact skipped, " + e.detail());
    }
  }
  if (options.strict_entry && !out.errors.empty()) {
    out.reports.clear();
    out.impact.reset();
  }
  return out;
}

std::size_t resolve_workers(std::optional<std::string> flag, const BatchPlan& plan) {
  auto parse = [](std::string_view s, std::string_view source) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
      throw Error(ErrorCode::InvalidArgument, std::string(source) + " must be a positive integer, got '" + std::string(s) + "'");
    }
    return v;
  };
  if (flag) return parse(*flag, "--workers");
  if (const char* env = std::getenv("UARADAR_WORKERS"); env && *env) return parse(env, "UARADAR_WORKERS");
  if (plan.workers) return *plan.workers;
  return 1;
}

BatchSummary run_batch(const BatchPlan& plan, std::size_t workers, const RunOptions& options) {
  if (workers == 0) throw Error(ErrorCode::InvalidArgument, "workers must be at least 1");
  BatchSummary summary;
  summary.entries.resize(plan.entries.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < plan.entries.size(); i = next++) {
      EntryResult r;
      try {
        r = run_entry(plan.entries[i], plan.pairs, options);
        write_entry(r, plan.output_dir);
        if (options.svg) write_svgs(r, plan.output_dir);
      } catch (const std::exception& e) {
        r.page_url = plan.entries[i].page_url;
        r.id = plan.entries[i].id;
        r.errors.push_back(plan.entries[i].id + ": " + describe(e));
      }
      summary.entries[i] = std::move(r);
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t n = std::min(workers, std::max<std::size_t>(1, plan.entries.size()));
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work);
  }

  std::vector<ImpactReport> impacts;
  std::string log;
  std::map<std::tuple<std::string, std::string, Phase>, std::vector<RadarReport>> groups;
  for (const EntryResult& r : summary.entries) {
    if (!r.errors.empty()) ++summary.failed;
    for (const std::string& e : r.errors) log += "error " + e + "\n";
    for (const std::string& w : r.warnings) log += "warning " + w + "\n";
    if (r.impact) impacts.push_back(*r.impact);
    if (!r.group) continue;
    for (const RadarReport& report : r.reports) groups[{*r.group, report.pair_label, report.phase}].push_back(report);
  }
  write_file_atomic(plan.output_dir / "summary.csv", impact_summary_csv(impacts));
  write_file_atomic(plan.output_dir / "errors.log", log);
  for (const auto& [key, reports] : groups) {
    const auto& [group, pair, phase] = key;
    RadarReport agg = aggregate_reports(reports, group);
    if (reports.size() == 1) {
      // Keep a single input in aggregate form so every file has one shape.
      agg.evidence.reset();
      agg.group = group;
      agg.samples = {};
      for (std::size_t i = 0; i < kAxes.size(); ++i) agg.samples[i] = agg.axes[i] ? 1 : 0;
      agg.aggregate_of = 1;
    }
    write_report(agg, plan.output_dir / "aggregates" /
                          (file_safe(group) + "." + file_safe(pair) + "." + std::string(to_string(phase)) + ".json"));
  }
  return summary;
}

}  // namespace uaradar
