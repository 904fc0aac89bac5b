#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "uaradar/dom.hpp"
#include "uaradar/snapshot.hpp"
#include "uaradar/visualdiff.hpp"

namespace fixtures {

namespace fs = std::filesystem;

// C, CN, F, FN, W, WN.
uaradar::BrowserConfig config(const std::string& label);
inline const std::vector<std::string> kSixConfigs = {"C", "CN", "F", "FN", "W", "WN"};

// Deterministic word soup.
std::string words(std::mt19937_64& rng, int n);

struct Asset {
  std::string url;
  uaradar::ResourceKind kind = uaradar::ResourceKind::script;
  std::string bytes;
};

struct Page {
  std::string url = "https://site.test/";
  std::string html;
  std::vector<Asset> assets;
};

// News-style homepage: nav, headline list, sidebar, footer, and the
// script/stylesheet it references.
Page homepage(std::uint64_t seed, const std::string& url = "https://site.test/");

// Adds the parts that change from visit to visit: a "last updated"
// timestamp line and an ad script whose URL and body rotate.
Page with_dynamic_parts(Page page, const std::string& timestamp, int rotation);

std::string script_bytes(std::mt19937_64& rng, int functions);
std::string stylesheet_bytes(std::mt19937_64& rng, int rules);

// Boxes and glyph bars laid out from the DOM; a stand-in for a full-page
// browser screenshot that reacts to text, images, iframes and disabled
// controls. The image is cropped to the laid-out height.
uaradar::RgbImage render(const uaradar::DomTree& dom, int width = 480, int max_height = 4000);

// Writes one visit (screenshot rendered for post_js) and returns its dir.
fs::path write_visit(const fs::path& dir, const Page& page, const std::string& label, uaradar::Phase phase,
                     int visit, const std::string& captured_at = "2026-01-01T00:00:00Z");

// Recursively copies a directory.
void copy_tree(const fs::path& from, const fs::path& to);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

// Replaces the first occurrence of `what` in `s`; aborts when absent.
std::string replace(std::string s, const std::string& what, const std::string& with);

}  // namespace fixtures
