#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uaradar/dom.hpp"
#include "uaradar/snapshot.hpp"
#include "uaradar/visualdiff.hpp"

namespace uaradar {

// Content that stayed put across visits of one page under one config.
struct Backbone {
  std::string page_url;
  BrowserConfig config;
  Phase phase = Phase::pre_js;
  std::string captured_at;  // latest capture time among the source visits
  std::optional<int> http_status;
  std::optional<Viewport> viewport;
  std::optional<bool> full_page;

  DomTree stable_dom;
  std::string stable_text;
  std::vector<ResourceRecord> stable_resources;  // scripts and stylesheets
  std::optional<ResourceRecord> screenshot;      // from the first visit
  std::optional<ContourProfile> profile;         // of that screenshot
  double visual_floor = 0.0;                     // S_raw between the visits

  std::vector<int> source_visits;               // sorted, unique
  std::size_t pruned_nodes = 0;                 // DOM nodes dropped so far
  std::vector<std::string> volatile_resources;  // "kind url", sorted, unique
};

// Field-wise equality; resources compare by kind, url and digest, the DOM
// with same_tree().
bool equivalent(const Backbone& a, const Backbone& b);

// Whole snapshot as a (trivially stable) backbone.
Backbone backbone_of(const Snapshot& s, const VisualOptions& options = {});

// Throws ConfigMismatch, PhaseMismatch or PageUrlMismatch.
Backbone extract_backbone(const Snapshot& v1, const Snapshot& v2, const VisualOptions& options = {});

// Backbone of two backbones: DOM matched-unchanged nodes plus ancestors,
// text from equal hunks, resources by (kind, url, digest), floor is the max
// of both floors and the S_raw between their profiles.
Backbone extract_backbone(const Backbone& a, const Backbone& b);

// max(0, cross - max(floor_a, floor_b)).
double effective_visual_dissimilarity(double cross, double floor_a, double floor_b);

// Snapshot-shaped directory (manifest, page.html, resources, screenshot)
// plus backbone.json. The directory is assembled beside the target and
// renamed into place.
void save_backbone(const Backbone& b, const std::filesystem::path& dir);

// Reads a backbone directory, or a plain snapshot directory as backbone_of().
Backbone load_backbone(const std::filesystem::path& dir, const VisualOptions& options = {});

}  // namespace uaradar
