#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include <unistd.h>

namespace fixtures {

using namespace uaradar;

BrowserConfig config(const std::string& label) {
  BrowserConfig c;
  c.label = label;
  switch (label.empty() ? '?' : label[0]) {
    case 'C': c.engine_id = "chromium"; break;
    case 'F': c.engine_id = "firefox"; break;
    case 'W': c.engine_id = "webkit"; break;
    default: throw std::invalid_argument("unknown config " + label);
  }
  c.ua_mode = label.size() > 1 && label[1] == 'N' ? UaMode::none : UaMode::standard;
  return c;
}

namespace {

const std::vector<std::string> kVocabulary = {
    "market", "river",   "council", "season", "report", "launch", "garden", "energy", "travel", "review",
    "winter", "science", "budget",  "city",   "match",  "record", "storm",  "school", "health", "music",
    "policy", "coast",   "design",  "film",   "island", "future", "bridge", "forest", "vote",   "league"};

}  // namespace

std::string words(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<std::size_t> pick(0, kVocabulary.size() - 1);
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += kVocabulary[pick(rng)];
  }
  return out;
}

std::string script_bytes(std::mt19937_64& rng, int functions) {
  std::string out = "(function(){\"use strict\";var cfg={version:" + std::to_string(rng() % 100) + "};\n";
  for (int i = 0; i < functions; ++i) {
    const std::string name = "f" + std::to_string(i) + "_" + std::to_string(rng() % 1000);
    out += "function " + name + "(a,b){var s=\"" + words(rng, 3) + "\";if(a>" + std::to_string(rng() % 50) +
           "){return a*b+" + std::to_string(rng() % 9) + ";}for(var i=0;i<b;i++){s+=String(i);}return s.length;}\n";
    out += "cfg." + name + "=" + name + ";\n";
  }
  out += "window.site=cfg;})();\n";
  return out;
}

std::string stylesheet_bytes(std::mt19937_64& rng, int rules) {
  static const std::vector<std::string> props = {"color", "padding", "font-size", "line-height", "border", "width"};
  std::string out = "body { margin: 0; font-family: sans-serif; }\n.headline { margin-top: 8px; }\n";
  for (int i = 0; i < rules; ++i) {
    out += ".c" + std::to_string(i) + " { ";
    for (int k = 0; k < 3; ++k) {
      out += props[(i + k) % props.size()] + ": " + std::to_string(rng() % 40) + "px; ";
    }
    out += "}\n";
  }
  return out;
}

Page homepage(std::uint64_t seed, const std::string& url) {
  std::mt19937_64 rng(seed);
  Page p;
  p.url = url;
  const std::string script_url = url + "static/app.js";
  const std::string style_url = url + "static/site.css";
  p.assets.push_back({script_url, ResourceKind::script, script_bytes(rng, 8 + static_cast<int>(seed % 5))});
  p.assets.push_back({style_url, ResourceKind::stylesheet, stylesheet_bytes(rng, 6 + static_cast<int>(seed % 4))});

  std::string h = "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" + words(rng, 2) +
                  "</title>\n<link rel=\"stylesheet\" href=\"" + style_url + "\">\n<script src=\"" + script_url +
                  "\"></script>\n</head>\n<body>\n<header class=\"top\">\n<h1>" + words(rng, 2) + "</h1>\n<nav>\n<ul>\n";
  for (int i = 0; i < 5; ++i) h += "<li><a href=\"/s" + std::to_string(i) + "\">" + words(rng, 1) + "</a></li>\n";
  h += "</ul>\n</nav>\n</header>\n<main>\n<section class=\"news\">\n";
  const int stories = 4 + static_cast<int>(seed % 4);
  for (int i = 0; i < stories; ++i) {
    h += "<article class=\"c" + std::to_string(i % 6) + "\">\n<h2 class=\"headline\">" + words(rng, 4) + "</h2>\n<p>" +
         words(rng, 12) + "</p>\n";
    if (i % 2 == 0) h += "<img src=\"/img/" + std::to_string(rng() % 10000) + ".jpg\" width=\"80\" height=\"40\">\n";
    h += "</article>\n";
  }
  h += "</section>\n<aside>\n<h3>" + words(rng, 2) + "</h3>\n<p>" + words(rng, 8) +
       "</p>\n<button class=\"sub\">Subscribe</button>\n</aside>\n</main>\n<footer><p>" + words(rng, 5) +
       "</p></footer>\n</body>\n</html>\n";
  p.html = std::move(h);
  return p;
}

Page with_dynamic_parts(Page page, const std::string& timestamp, int rotation) {
  const std::string ad_url = "https://ads.test/rot/" + std::to_string(rotation) + "/ad.js";
  page.html = replace(page.html, "<footer>", "<footer><p class=\"updated\">Last updated " + timestamp + "</p>");
  page.html = replace(page.html, "</body>", "<script src=\"" + ad_url + "\"></script>\n</body>");
  page.assets.push_back({ad_url, ResourceKind::script,
                         "var slot" + std::to_string(rotation) + "=render(\"creative-" + std::to_string(rotation * 7919) +
                             "\");"});
  return page;
}

namespace {

class Canvas {
 public:
  Canvas(int w, int h) : img_{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * 3, 255)} {}

  void fill(int x0, int y0, int w, int h, std::uint8_t v) {
    for (int y = std::max(0, y0); y < std::min(img_.height, y0 + h); ++y) {
      for (int x = std::max(0, x0); x < std::min(img_.width, x0 + w); ++x) {
        auto* px = &img_.rgb[(static_cast<std::size_t>(y) * img_.width + x) * 3];
        px[0] = px[1] = px[2] = v;
      }
    }
  }

  void frame(int x0, int y0, int w, int h, std::uint8_t v) {
    fill(x0, y0, w, 1, v);
    fill(x0, y0 + h - 1, w, 1, v);
    fill(x0, y0, 1, h, v);
    fill(x0 + w - 1, y0, 1, h, v);
  }

  // Keeps rows [0, h).
  RgbImage take(int h) {
    img_.height = std::clamp(h, 1, img_.height);
    img_.rgb.resize(static_cast<std::size_t>(img_.width) * img_.height * 3);
    return std::move(img_);
  }
  int width() const { return img_.width; }

 private:
  RgbImage img_;
};

const std::set<std::string> kSkipped = {"head", "script", "style", "title", "meta", "link"};
const std::set<std::string> kInline = {"a", "span", "b", "i", "em", "strong", "code"};

int attr_int(const DomNode& n, std::string_view key, int fallback) {
  const std::string* v = n.attr(key);
  if (!v) return fallback;
  try {
    return std::clamp(std::stoi(*v), 1, 400);
  } catch (...) {
    return fallback;
  }
}

}  // namespace

RgbImage render(const DomTree& dom, int width, int max_height) {
  Canvas c(width, max_height);
  const int height = max_height;
  int x = 8;
  int y = 8;
  constexpr int kLine = 12;
  auto newline = [&] {
    if (x > 8) y += kLine;
    x = 8;
  };
  auto text = [&](const std::string& s, std::uint8_t shade) {
    for (unsigned char ch : s) {
      if (ch == ' ') {
        x += 4;
        continue;
      }
      if (x + 3 > width - 8) {
        y += kLine;
        x = 8;
      }
      const int h = 3 + (ch * 7) % 6;
      c.fill(x, y + 8 - h, 3, h, shade);
      x += 4;
    }
  };
  std::vector<int> stack = {dom.root};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const DomNode& n = dom[id];
    if (kSkipped.contains(n.tag)) continue;
    if (!kInline.contains(n.tag)) newline();
    if (n.tag == "img") {
      const int w = attr_int(n, "width", 64);
      const int h = attr_int(n, "height", 48);
      const std::string* src = n.attr("src");
      const bool loaded = src && !src->empty() && src->find("placeholder") == std::string::npos;
      if (loaded) {
        c.fill(x, y, w, h, 60);
      } else {
        c.frame(x, y, w, h, 120);
      }
      y += h + 4;
    } else if (n.tag == "iframe") {
      const int w = attr_int(n, "width", 120);
      const int h = attr_int(n, "height", 60);
      c.frame(x, y, w, h, 40);
      c.fill(x + 4, y + 4, w / 2, h / 2, 90);
      y += h + 4;
    } else if (n.tag == "button") {
      const bool disabled = n.attr("disabled") != nullptr;
      const std::uint8_t shade = disabled ? 225 : 30;
      const int start = x;
      text(" " + n.text + " ", shade);
      c.frame(start - 2, y - 2, x - start + 4, kLine, shade);
      newline();
    } else if (!n.text.empty()) {
      text(n.text, n.tag == "h1" || n.tag == "h2" ? 10 : 50);
      text(" ", 0);
    }
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
    if (y > height) break;
  }
  newline();
  return c.take(y + 8);
}

fs::path write_visit(const fs::path& dir, const Page& page, const std::string& label, Phase phase, int visit,
                     const std::string& captured_at) {
  SnapshotDraft d;
  d.page_url = page.url;
  d.config = config(label);
  d.phase = phase;
  d.visit_index = visit;
  d.captured_at = captured_at;
  d.http_status = 200;
  d.items.push_back({page.url, ResourceKind::document, page.html});
  for (const Asset& a : page.assets) d.items.push_back({a.url, a.kind, a.bytes});
  if (phase == Phase::post_js) {
    d.viewport = Viewport{480, 400};
    d.full_page = true;
    d.items.push_back({page.url + "#screenshot", ResourceKind::screenshot, encode_png(render(parse_html(page.html)))});
  }
  write_snapshot(d, dir);
  return dir;
}

void copy_tree(const fs::path& from, const fs::path& to) {
  fs::create_directories(to);
  fs::copy(from, to, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("uaradar-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  if (!std::getenv("UARADAR_KEEP_TMP")) fs::remove_all(path_, ec);
}

std::string replace(std::string s, const std::string& what, const std::string& with) {
  const auto p = s.find(what);
  if (p == std::string::npos) throw std::logic_error("fixture edit: '" + what + "' not found");
  s.replace(p, what.size(), with);
  return s;
}

}  // namespace fixtures
