#include "uaradar/snapshot.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "uaradar/error.hpp"
#include "uaradar/io.hpp"
#include "uaradar/simhash.hpp"
#include "uaradar/text.hpp"
#include "uaradar/url.hpp"

namespace uaradar {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(UaMode m) noexcept {
  return m == UaMode::none ? "none" : "standard";
}

std::string_view to_string(ResourceKind k) noexcept {
  switch (k) {
    case ResourceKind::document: return "document";
    case ResourceKind::script: return "script";
    case ResourceKind::stylesheet: return "stylesheet";
    case ResourceKind::screenshot: return "screenshot";
  }
  return "document";
}

std::string_view to_string(Phase p) noexcept {
  return p == Phase::post_js ? "post_js" : "pre_js";
}

std::string_view to_string(MatchBasis b) noexcept {
  switch (b) {
    case MatchBasis::exact_url: return "exact_url";
    case MatchBasis::path_no_query: return "path_no_query";
    case MatchBasis::lsh_nearest: return "lsh_nearest";
    case MatchBasis::unmatched: return "unmatched";
  }
  return "unmatched";
}

std::optional<UaMode> parse_ua_mode(std::string_view s) noexcept {
  if (s == "standard") return UaMode::standard;
  if (s == "none") return UaMode::none;
  return std::nullopt;
}

std::optional<ResourceKind> parse_resource_kind(std::string_view s) noexcept {
  if (s == "document") return ResourceKind::document;
  if (s == "script") return ResourceKind::script;
  if (s == "stylesheet") return ResourceKind::stylesheet;
  if (s == "screenshot") return ResourceKind::screenshot;
  return std::nullopt;
}

std::optional<Phase> parse_phase(std::string_view s) noexcept {
  if (s == "pre_js") return Phase::pre_js;
  if (s == "post_js") return Phase::post_js;
  return std::nullopt;
}

const std::string& ResourceRecord::bytes() const {
  static const std::string kEmpty;
  return content ? *content : kEmpty;
}

const ResourceRecord& Snapshot::document() const {
  for (const auto& r : resources) {
    if (r.kind == ResourceKind::document) return r;
  }
  throw Error(ErrorCode::SchemaViolation, "document");
}

const ResourceRecord* Snapshot::screenshot() const {
  for (const auto& r : resources) {
    if (r.kind == ResourceKind::screenshot) return &r;
  }
  return nullptr;
}

namespace {

[[noreturn]] void schema(const std::string& field) {
  throw Error(ErrorCode::SchemaViolation, field);
}

const json& require(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) schema(field);
  return *it;
}

std::string require_string(const json& obj, const char* field) {
  const json& v = require(obj, field);
  if (!v.is_string()) schema(field);
  return v.get<std::string>();
}

bool is_lower_hex64(const std::string& s) {
  return s.size() == 64 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

bool is_iso8601_utc(const std::string& s) {
  static const std::regex kPattern(
      R"(^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d{1,9})?Z$)");
  return std::regex_match(s, kPattern);
}

bool is_safe_relative(const std::string& p) {
  if (p.empty()) return false;
  fs::path path(p);
  if (path.is_absolute()) return false;
  for (const auto& part : path) {
    if (part == "..") return false;
  }
  return true;
}

json to_json(const Snapshot& s) {
  json j;
  j["page_url"] = s.page_url;
  j["engine_id"] = s.config.engine_id;
  j["ua_mode"] = to_string(s.config.ua_mode);
  j["label"] = s.config.label;
  j["phase"] = to_string(s.phase);
  j["visit_index"] = s.visit_index;
  j["captured_at"] = s.captured_at;
  if (s.http_status) j["http_status"] = *s.http_status;
  if (s.viewport) {
    j["viewport"] = {{"width", s.viewport->width},
                     {"height", s.viewport->height}};
  }
  if (s.full_page) j["full_page"] = *s.full_page;
  json res = json::array();
  for (const auto& r : s.resources) {
    json jr = {{"url", r.url},
               {"kind", to_string(r.kind)},
               {"path", r.path},
               {"digest", r.digest},
               {"byte_len", r.byte_len}};
    if (r.frame_url) jr["frame_url"] = *r.frame_url;
    res.push_back(std::move(jr));
  }
  j["resources"] = std::move(res);
  return j;
}

std::string extension_for(ResourceKind k) {
  switch (k) {
    case ResourceKind::script: return ".js";
    case ResourceKind::stylesheet: return ".css";
    case ResourceKind::screenshot: return ".png";
    case ResourceKind::document: return ".html";
  }
  return "";
}

}  // namespace

std::string manifest_json(const Snapshot& snap) {
  return to_json(snap).dump(2) + "\n";
}

Snapshot load_snapshot(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::is_regular_file(manifest_path)) {
    throw Error(ErrorCode::MissingManifest, manifest_path.string());
  }
  json j;
  try {
    j = json::parse(read_file(manifest_path));
  } catch (const json::parse_error&) {
    schema("manifest.json");
  }
  if (!j.is_object()) schema("manifest.json");

  Snapshot s;
  s.root = dir;
  s.page_url = require_string(j, "page_url");
  s.config.engine_id = require_string(j, "engine_id");
  if (s.config.engine_id.empty()) schema("engine_id");
  auto mode = parse_ua_mode(require_string(j, "ua_mode"));
  if (!mode) schema("ua_mode");
  s.config.ua_mode = *mode;
  s.config.label = require_string(j, "label");
  if (s.config.label.empty()) schema("label");
  auto phase = parse_phase(require_string(j, "phase"));
  if (!phase) schema("phase");
  s.phase = *phase;
  const json& visit = require(j, "visit_index");
  if (!visit.is_number_integer()) schema("visit_index");
  s.visit_index = visit.get<int>();
  if (s.visit_index != 1 && s.visit_index != 2) schema("visit_index");
  s.captured_at = require_string(j, "captured_at");
  if (!is_iso8601_utc(s.captured_at)) schema("captured_at");

  if (auto it = j.find("http_status"); it != j.end()) {
    if (!it->is_number_integer()) schema("http_status");
    s.http_status = it->get<int>();
  }
  if (auto it = j.find("viewport"); it != j.end()) {
    if (!it->is_object() || !it->contains("width") || !it->contains("height") ||
        !(*it)["width"].is_number_integer() ||
        !(*it)["height"].is_number_integer()) {
      schema("viewport");
    }
    s.viewport = Viewport{(*it)["width"].get<int>(), (*it)["height"].get<int>()};
  }
  if (auto it = j.find("full_page"); it != j.end()) {
    if (!it->is_boolean()) schema("full_page");
    s.full_page = it->get<bool>();
  }

  const json& res = require(j, "resources");
  if (!res.is_array()) schema("resources");
  std::set<std::pair<ResourceKind, std::string>> seen;
  int documents = 0;
  int screenshots = 0;
  for (const json& jr : res) {
    if (!jr.is_object()) schema("resources");
    ResourceRecord r;
    r.url = require_string(jr, "url");
    auto kind = parse_resource_kind(require_string(jr, "kind"));
    if (!kind) schema("kind");
    r.kind = *kind;
    r.path = require_string(jr, "path");
    if (!is_safe_relative(r.path)) schema("path");
    r.digest = require_string(jr, "digest");
    if (!is_lower_hex64(r.digest)) schema("digest");
    const json& len = require(jr, "byte_len");
    if (!len.is_number_unsigned() && !(len.is_number_integer() && len.get<long long>() >= 0)) {
      schema("byte_len");
    }
    r.byte_len = len.get<std::uint64_t>();
    if (auto it = jr.find("frame_url"); it != jr.end()) {
      if (!it->is_string()) schema("frame_url");
      r.frame_url = it->get<std::string>();
    }

    const fs::path file = dir / r.path;
    if (!fs::is_regular_file(file)) throw Error(ErrorCode::MissingFile, r.path);
    auto bytes = std::make_shared<const std::string>(read_file(file));
    if (sha256_hex(*bytes) != r.digest || bytes->size() != r.byte_len) {
      throw Error(ErrorCode::DigestMismatch, r.path);
    }
    r.content = std::move(bytes);

    if (!seen.emplace(r.kind, r.url).second) {
      s.warnings.push_back("duplicate " + std::string(to_string(r.kind)) +
                           " url kept first occurrence: " + r.url);
      continue;
    }
    if (r.kind == ResourceKind::document) ++documents;
    if (r.kind == ResourceKind::screenshot) ++screenshots;
    s.resources.push_back(std::move(r));
  }
  if (documents != 1) schema("document");
  if (screenshots > 1) schema("screenshot");
  if (s.phase == Phase::post_js && screenshots == 0) schema("screenshot");
  return s;
}

Snapshot write_snapshot(const SnapshotDraft& draft, const fs::path& dir) {
  fs::create_directories(dir);
  Snapshot s;
  s.page_url = draft.page_url;
  s.config = draft.config;
  s.phase = draft.phase;
  s.visit_index = draft.visit_index;
  s.captured_at = draft.captured_at;
  s.http_status = draft.http_status;
  s.viewport = draft.viewport;
  s.full_page = draft.full_page;
  for (const auto& item : draft.items) {
    ResourceRecord r;
    r.url = item.url;
    r.kind = item.kind;
    r.digest = sha256_hex(item.bytes);
    r.byte_len = item.bytes.size();
    switch (item.kind) {
      case ResourceKind::document: r.path = "page.html"; break;
      case ResourceKind::screenshot: r.path = "screenshot.png"; break;
      default: r.path = "resources/" + r.digest + extension_for(item.kind);
    }
    write_file_atomic(dir / r.path, item.bytes);
    s.resources.push_back(std::move(r));
  }
  write_file_atomic(dir / "manifest.json", manifest_json(s));
  return load_snapshot(dir);
}

void save_snapshot(const Snapshot& snap, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& r : snap.resources) {
    write_file_atomic(dir / r.path, r.bytes());
  }
  write_file_atomic(dir / "manifest.json", manifest_json(snap));
}

ResourcePairing pair_resources(const Snapshot& a, const Snapshot& b) {
  if (canonicalize_url(a.page_url) != canonicalize_url(b.page_url)) {
    throw Error(ErrorCode::PageUrlMismatch, a.page_url + " vs " + b.page_url);
  }
  const auto& L = a.resources;
  const auto& R = b.resources;
  std::vector<int> left_match(L.size(), -1);
  std::vector<int> right_match(R.size(), -1);
  std::vector<MatchBasis> basis_of(L.size(), MatchBasis::unmatched);

  auto link = [&](std::size_t i, std::size_t j, MatchBasis basis) {
    left_match[i] = static_cast<int>(j);
    right_match[j] = static_cast<int>(i);
    basis_of[i] = basis;
  };

  // Tiers 1 and 2: equal keys pair the k-th unmatched left with the k-th
  // unmatched right of the same kind, which keeps the result mirror-symmetric.
  auto key_tier = [&](auto key_fn, MatchBasis basis) {
    std::map<std::pair<ResourceKind, std::string>, std::vector<std::size_t>> right_by_key;
    for (std::size_t j = 0; j < R.size(); ++j) {
      if (right_match[j] < 0) right_by_key[{R[j].kind, key_fn(R[j].url)}].push_back(j);
    }
    std::map<std::pair<ResourceKind, std::string>, std::size_t> cursor;
    for (std::size_t i = 0; i < L.size(); ++i) {
      if (left_match[i] >= 0) continue;
      auto k = std::make_pair(L[i].kind, key_fn(L[i].url));
      auto it = right_by_key.find(k);
      if (it == right_by_key.end()) continue;
      std::size_t& c = cursor[k];
      if (c < it->second.size()) link(i, it->second[c++], basis);
    }
  };
  key_tier([](const std::string& u) { return canonicalize_url(u); },
           MatchBasis::exact_url);
  key_tier([](const std::string& u) { return canonical_url_without_query(u); },
           MatchBasis::path_no_query);

  // Singletons: the document and screenshot of two visits always correspond.
  for (ResourceKind kind : {ResourceKind::document, ResourceKind::screenshot}) {
    std::vector<std::size_t> li, rj;
    for (std::size_t i = 0; i < L.size(); ++i) {
      if (L[i].kind == kind && left_match[i] < 0) li.push_back(i);
    }
    for (std::size_t j = 0; j < R.size(); ++j) {
      if (R[j].kind == kind && right_match[j] < 0) rj.push_back(j);
    }
    if (li.size() == 1 && rj.size() == 1) {
      link(li[0], rj[0], MatchBasis::path_no_query);
    }
  }

  // Tier 3: nearest simhash within the radius, closest pairs first. Ties are
  // broken on the unordered URL pair so that swapping sides is a mirror.
  struct Candidate {
    int distance;
    std::string lo, hi;
    std::size_t i, j;
  };
  std::vector<Candidate> cands;
  std::vector<SimHash> lh(L.size()), rh(R.size());
  for (std::size_t i = 0; i < L.size(); ++i) {
    if (left_match[i] < 0) lh[i] = simhash64(L[i].bytes());
  }
  for (std::size_t j = 0; j < R.size(); ++j) {
    if (right_match[j] < 0) rh[j] = simhash64(R[j].bytes());
  }
  for (std::size_t i = 0; i < L.size(); ++i) {
    if (left_match[i] >= 0) continue;
    if (L[i].kind != ResourceKind::script && L[i].kind != ResourceKind::stylesheet) continue;
    for (std::size_t j = 0; j < R.size(); ++j) {
      if (right_match[j] >= 0 || R[j].kind != L[i].kind) continue;
      const int d = hamming_distance(lh[i], rh[j]);
      if (d > kLshPairingRadius) continue;
      const auto& ul = L[i].url;
      const auto& ur = R[j].url;
      cands.push_back({d, std::min(ul, ur), std::max(ul, ur), i, j});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.distance, x.lo, x.hi) < std::tie(y.distance, y.lo, y.hi);
  });
  for (const auto& c : cands) {
    if (left_match[c.i] < 0 && right_match[c.j] < 0) {
      link(c.i, c.j, MatchBasis::lsh_nearest);
    }
  }

  ResourcePairing out;
  for (std::size_t i = 0; i < L.size(); ++i) {
    ResourcePair p;
    p.left = L[i];
    if (left_match[i] >= 0) {
      p.right = R[static_cast<std::size_t>(left_match[i])];
      p.basis = basis_of[i];
    }
    out.pairs.push_back(std::move(p));
  }
  for (std::size_t j = 0; j < R.size(); ++j) {
    if (right_match[j] >= 0) continue;
    ResourcePair p;
    p.right = R[j];
    out.pairs.push_back(std::move(p));
  }
  return out;
}

}  // namespace uaradar
