// Python bindings: snapshots, backbones, reports, charts, impact, batch and
// the standalone similarity measures.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "uaradar/backbone.hpp"
#include "uaradar/batch.hpp"
#include "uaradar/domstruct.hpp"
#include "uaradar/error.hpp"
#include "uaradar/impact.hpp"
#include "uaradar/radar.hpp"
#include "uaradar/snapshot.hpp"
#include "uaradar/textdiff.hpp"
#include "uaradar/visualdiff.hpp"

namespace py = pybind11;
using namespace uaradar;

namespace {

py::dict axes_dict(const RadarReport& r) {
  py::dict d;
  for (std::size_t i = 0; i < kAxes.size(); ++i) {
    const auto& v = r.axes[i];
    d[py::str(std::string(to_string(kAxes[i])))] = v ? py::object(py::float_(*v)) : py::object(py::none());
  }
  return d;
}

py::dict profile_dict(const ContourProfile& p) {
  py::dict d;
  d["count"] = p.count;
  d["weighted_area"] = p.weighted_area;
  d["weighted_moment"] = p.weighted_moment;
  d["gm"] = p.gm;
  return d;
}

py::dict impact_dict(const ImpactReport& r) {
  py::list atoms;
  for (const Atom& a : r.matched_atoms) {
    py::dict d;
    d["category"] = std::string(to_string(a.category));
    d["name"] = a.name;
    d["context"] = a.context;
    atoms.append(d);
  }
  py::dict d;
  d["page_url"] = r.page_url;
  d["label"] = std::string(to_string(r.label));
  d["severity"] = std::string(to_string(r.severity));
  d["matched_atoms"] = atoms;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Similarity radar and impact classifier for captured web pages";

  static py::object error_type = py::reinterpret_steal<py::object>(
      PyErr_NewExceptionWithDoc("uaradar.UaradarError", "Toolkit failure; `code` names the error kind.", nullptr, nullptr));
  m.attr("UaradarError") = error_type;
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::gil_scoped_acquire gil;
      const std::string code(to_string(e.code()));
      py::object inst = error_type(code + ": " + e.detail());
      inst.attr("code") = code;
      inst.attr("detail") = e.detail();
      PyErr_SetObject(error_type.ptr(), inst.ptr());
    }
  });

  py::class_<Snapshot>(m, "Snapshot")
      .def_readonly("page_url", &Snapshot::page_url)
      .def_readonly("visit_index", &Snapshot::visit_index)
      .def_readonly("captured_at", &Snapshot::captured_at)
      .def_readonly("warnings", &Snapshot::warnings)
      .def_property_readonly("phase", [](const Snapshot& s) { return std::string(to_string(s.phase)); })
      .def_property_readonly("config", [](const Snapshot& s) { return s.config.label; })
      .def_property_readonly("engine", [](const Snapshot& s) { return s.config.engine_id; })
      .def_property_readonly("ua_mode", [](const Snapshot& s) { return std::string(to_string(s.config.ua_mode)); })
      .def_property_readonly("resource_count", [](const Snapshot& s) { return s.resources.size(); })
      .def_property_readonly("document", [](const Snapshot& s) { return py::bytes(s.document().bytes()); });

  py::class_<Backbone>(m, "Backbone")
      .def_readonly("page_url", &Backbone::page_url)
      .def_readonly("captured_at", &Backbone::captured_at)
      .def_readonly("stable_text", &Backbone::stable_text)
      .def_readonly("visual_floor", &Backbone::visual_floor)
      .def_readonly("pruned_nodes", &Backbone::pruned_nodes)
      .def_readonly("source_visits", &Backbone::source_visits)
      .def_readonly("volatile_resources", &Backbone::volatile_resources)
      .def_property_readonly("phase", [](const Backbone& b) { return std::string(to_string(b.phase)); })
      .def_property_readonly("config", [](const Backbone& b) { return b.config.label; })
      .def_property_readonly("node_count", [](const Backbone& b) { return b.stable_dom.size(); })
      .def_property_readonly("stable_resources", [](const Backbone& b) {
        std::vector<std::string> out;
        for (const ResourceRecord& r : b.stable_resources) out.push_back(std::string(to_string(r.kind)) + " " + r.url);
        return out;
      });

  py::class_<RadarReport>(m, "Report")
      .def_readonly("page_url", &RadarReport::page_url)
      .def_readonly("pair_label", &RadarReport::pair_label)
      .def_readonly("created_at", &RadarReport::created_at)
      .def_readonly("group", &RadarReport::group)
      .def_readonly("aggregate_of", &RadarReport::aggregate_of)
      .def_property_readonly("phase", [](const RadarReport& r) { return std::string(to_string(r.phase)); })
      .def_property_readonly("axes", &axes_dict)
      .def_property_readonly("has_evidence", [](const RadarReport& r) { return r.evidence.has_value(); })
      .def("to_json", &report_json)
      .def("__repr__", [](const RadarReport& r) {
        return "<Report " + r.pair_label + " " + std::string(to_string(r.phase)) + " " + r.page_url + ">";
      });

  py::class_<VisualOptions>(m, "VisualOptions").def(py::init<>()).def_readwrite("canny", &VisualOptions::canny);

  m.def("load_snapshot", &load_snapshot, py::arg("path"), "Validated snapshot directory.");
  m.def("extract_backbone", py::overload_cast<const Snapshot&, const Snapshot&, const VisualOptions&>(&extract_backbone),
        py::arg("v1"), py::arg("v2"), py::arg_v("options", VisualOptions{}, "VisualOptions()"),
        "Stable backbone of two visits of one page under one config.");
  m.def("merge_backbones", py::overload_cast<const Backbone&, const Backbone&>(&extract_backbone), py::arg("a"),
        py::arg("b"), "Backbone of two backbones.");
  m.def("load_backbone", [](const std::filesystem::path& p) { return load_backbone(p); }, py::arg("path"),
        "Backbone directory, or a snapshot directory taken as its own backbone.");
  m.def("save_backbone", &save_backbone, py::arg("backbone"), py::arg("path"));

  m.def(
      "compare",
      [](const Backbone& a, const Backbone& b, std::optional<std::string> pair_label, bool raw_html_content) {
        CompareOptions o;
        o.pair_label = std::move(pair_label);
        o.raw_html_content = raw_html_content;
        return compare_backbones(a, b, o);
      },
      py::arg("a"), py::arg("b"), py::arg("pair_label") = py::none(), py::arg("raw_html_content") = false,
      "Five-axis radar report for two backbones.");
  m.def("parse_report", &parse_report_json, py::arg("text"));
  m.def("read_report", &read_report, py::arg("path"));
  m.def("write_report", &write_report, py::arg("report"), py::arg("path"));
  m.def("recompute_axes", [](const RadarReport& r) {
    if (!r.evidence) throw Error(ErrorCode::MissingEvidence, r.pair_label);
    RadarReport copy = r;
    copy.axes = recompute_axes(*r.evidence, r.phase);
    return axes_dict(copy);
  }, py::arg("report"), "Axis values derived from the report's evidence block.");
  m.def("radar_svg", &radar_svg, py::arg("reports"), "Radar chart of 1 to 3 reports of one page.");
  m.def("aggregate", &aggregate_reports, py::arg("reports"), py::arg("group"), "Per-axis mean over non-null values.");

  m.def("classify", [](const std::vector<RadarReport>& reports) { return impact_dict(classify_reports(reports)); },
        py::arg("reports"), "Impact label and severity for one page's reports.");
  m.def("delta", [](const RadarReport& r) {
    py::list out;
    for (const Atom& a : extract_delta(r).atoms()) {
      out.append(py::make_tuple(std::string(to_string(a.category)), a.name, a.context));
    }
    return out;
  }, py::arg("report"), "Change atoms of a report as (category, name, context) tuples.");
  m.def("severity_of", [](const std::string& label) {
    const auto l = parse_impact_label(label);
    if (!l) throw Error(ErrorCode::InvalidArgument, "unknown label " + label);
    return std::string(to_string(severity_of(*l)));
  }, py::arg("label"));

  m.def(
      "run_batch",
      [](const std::filesystem::path& plan_path, std::optional<std::size_t> workers, bool strict_entry, bool svg) {
        const BatchPlan plan = load_plan(plan_path);
        RunOptions o;
        o.strict_entry = strict_entry;
        o.svg = svg;
        const std::size_t n = workers ? *workers : resolve_workers(std::nullopt, plan);
        py::gil_scoped_release release;
        return run_batch(plan, n, o).exit_code();
      },
      py::arg("plan"), py::arg("workers") = py::none(), py::arg("strict_entry") = false, py::arg("svg") = false,
      "Runs a plan file; returns 0 when no entry failed, else 1.");

  m.def("content_similarity", [](const std::string& a, const std::string& b) { return content_similarity(a, b).s2; },
        py::arg("a"), py::arg("b"), "1 - 2d / (|a| + |b| + d) over hunk-derived edit distance.");
  m.def("hunk_levenshtein", [](const std::string& a, const std::string& b) { return hunk_levenshtein(myers_diff(a, b)); },
        py::arg("a"), py::arg("b"));
  m.def("structure_similarity",
        [](const std::string& a, const std::string& b) {
          return structure_similarity(sftm_match(parse_html(a), parse_html(b)));
        },
        py::arg("html_a"), py::arg("html_b"), "S1 between two HTML documents.");
  m.def("tree_edit_distance", [](const std::string& a, const std::string& b) { return ted_oracle(parse_html(a), parse_html(b)); },
        py::arg("html_a"), py::arg("html_b"), "Zhang-Shasha distance between two HTML documents.");
  m.def("screenshot_profile", [](py::bytes png) { return profile_dict(screenshot_profile(std::string(png))); },
        py::arg("png"), "Contour profile of a PNG screenshot.");
  m.def("visual_similarity",
        [](py::bytes a, py::bytes b) {
          return visual_similarity(screenshot_profile(std::string(a)), screenshot_profile(std::string(b)));
        },
        py::arg("png_a"), py::arg("png_b"));
}
