#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uaradar {

enum class UaMode { standard, none };
enum class ResourceKind { document, script, stylesheet, screenshot };
enum class Phase { pre_js, post_js };
enum class MatchBasis { exact_url, path_no_query, lsh_nearest, unmatched };

std::string_view to_string(UaMode m) noexcept;
std::string_view to_string(ResourceKind k) noexcept;
std::string_view to_string(Phase p) noexcept;
std::string_view to_string(MatchBasis b) noexcept;
std::optional<UaMode> parse_ua_mode(std::string_view s) noexcept;
std::optional<ResourceKind> parse_resource_kind(std::string_view s) noexcept;
std::optional<Phase> parse_phase(std::string_view s) noexcept;

struct BrowserConfig {
  std::string engine_id;  // "chromium", "firefox", "webkit", ...
  UaMode ua_mode = UaMode::standard;
  std::string label;  // "C", "CN", ...

  friend bool operator==(const BrowserConfig&, const BrowserConfig&) = default;
};

struct ResourceRecord {
  std::string url;
  ResourceKind kind = ResourceKind::document;
  std::string path;    // relative to the snapshot directory
  std::string digest;  // lowercase hex SHA-256
  std::uint64_t byte_len = 0;
  std::optional<std::string> frame_url;

  // File bytes, populated by load_snapshot(). Not part of record identity.
  std::shared_ptr<const std::string> content;

  const std::string& bytes() const;

  friend bool operator==(const ResourceRecord& a, const ResourceRecord& b) {
    return a.url == b.url && a.kind == b.kind && a.path == b.path &&
           a.digest == b.digest && a.byte_len == b.byte_len &&
           a.frame_url == b.frame_url;
  }
};

struct Viewport {
  int width = 0;
  int height = 0;
  friend bool operator==(const Viewport&, const Viewport&) = default;
};

struct Snapshot {
  std::string page_url;
  BrowserConfig config;
  Phase phase = Phase::pre_js;
  int visit_index = 1;
  std::string captured_at;  // ISO-8601 UTC
  std::vector<ResourceRecord> resources;

  // Optional manifest extension fields.
  std::optional<int> http_status;
  std::optional<Viewport> viewport;
  std::optional<bool> full_page;

  // Load-time context; excluded from equality.
  std::filesystem::path root;
  std::vector<std::string> warnings;

  const ResourceRecord& document() const;
  const ResourceRecord* screenshot() const;

  friend bool operator==(const Snapshot& a, const Snapshot& b) {
    return a.page_url == b.page_url && a.config == b.config &&
           a.phase == b.phase && a.visit_index == b.visit_index &&
           a.captured_at == b.captured_at && a.resources == b.resources &&
           a.http_status == b.http_status && a.viewport == b.viewport &&
           a.full_page == b.full_page;
  }
};

// Reads and validates <dir>/manifest.json, re-hashing every resource file.
// Errors: MissingManifest, SchemaViolation(field), DigestMismatch(path),
// MissingFile(path).
Snapshot load_snapshot(const std::filesystem::path& dir);

// In-memory description of a visit, used by the fixture writer and the
// backbone serializer. Paths and digests are assigned on write.
struct SnapshotDraft {
  struct Item {
    std::string url;
    ResourceKind kind = ResourceKind::script;
    std::string bytes;
  };
  std::string page_url;
  BrowserConfig config;
  Phase phase = Phase::pre_js;
  int visit_index = 1;
  std::string captured_at = "1970-01-01T00:00:00Z";
  std::vector<Item> items;
  std::optional<int> http_status;
  std::optional<Viewport> viewport;
  std::optional<bool> full_page;
};

// Lays out page.html, screenshot.png and resources/<sha256>.<ext>, writes the
// manifest last, and returns the re-loaded snapshot.
Snapshot write_snapshot(const SnapshotDraft& draft,
                        const std::filesystem::path& dir);

// Writes an already-loaded snapshot (manifest plus every file at its recorded
// path) into another directory.
void save_snapshot(const Snapshot& snap, const std::filesystem::path& dir);

std::string manifest_json(const Snapshot& snap);

struct ResourcePair {
  std::optional<ResourceRecord> left;
  std::optional<ResourceRecord> right;
  MatchBasis basis = MatchBasis::unmatched;
};

struct ResourcePairing {
  std::vector<ResourcePair> pairs;
};

// Simhash Hamming radius for the lsh_nearest tier.
inline constexpr int kLshPairingRadius = 6;

// Partial one-to-one matching of same-kind resources with precedence
// exact_url > path_no_query > lsh_nearest > unmatched. Throws
// PageUrlMismatch.
ResourcePairing pair_resources(const Snapshot& a, const Snapshot& b);

}  // namespace uaradar
