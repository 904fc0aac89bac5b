#include "uaradar/visualdiff.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "uaradar/error.hpp"

namespace uaradar {

std::size_t BinaryImage::foreground() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

RgbImage decode_png(std::string_view bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::DecodeError, image.message);
  }
  image.format = PNG_FORMAT_RGB;
  RgbImage out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.rgb.resize(PNG_IMAGE_SIZE(image));
  png_color white{255, 255, 255};
  if (!png_image_finish_read(&image, &white, out.rgb.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::DecodeError, msg);
  }
  if (out.width <= 0 || out.height <= 0) throw Error(ErrorCode::DecodeError, "empty image");
  return out;
}

std::string encode_png(const RgbImage& img) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.rgb.data(), 0, nullptr)) {
    throw Error(ErrorCode::IoError, image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.rgb.data(), 0, nullptr)) {
    throw Error(ErrorCode::IoError, image.message);
  }
  out.resize(size);
  return out;
}

GrayImage to_gray(const RgbImage& img) {
  GrayImage g{img.width, img.height, {}};
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  g.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned r = img.rgb[3 * i], gr = img.rgb[3 * i + 1], b = img.rgb[3 * i + 2];
    g.pixels[i] = static_cast<std::uint8_t>((299 * r + 587 * gr + 114 * b + 500) / 1000);
  }
  return g;
}

OtsuResult otsu_threshold(const GrayImage& g) {
  std::array<double, 256> hist{};
  for (auto p : g.pixels) hist[p] += 1.0;
  const double total = static_cast<double>(g.pixels.size());
  if (std::count_if(hist.begin(), hist.end(), [](double h) { return h > 0; }) <= 1) return {255, true};

  double sum_all = 0.0;
  for (int i = 0; i < 256; ++i) sum_all += i * hist[static_cast<std::size_t>(i)];
  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int threshold = 0;
  for (int t = 0; t < 256; ++t) {
    w0 += hist[static_cast<std::size_t>(t)];
    sum0 += t * hist[static_cast<std::size_t>(t)];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      threshold = t;
    }
  }
  return {threshold, false};
}

BinaryImage binarize(const GrayImage& g) {
  const OtsuResult t = otsu_threshold(g);
  BinaryImage b{g.width, g.height, std::vector<std::uint8_t>(g.pixels.size(), 0)};
  if (t.uniform) return b;
  for (std::size_t i = 0; i < g.pixels.size(); ++i) b.bits[i] = g.pixels[i] <= t.threshold ? 1 : 0;
  return b;
}

BinaryImage binarize_otsu(std::string_view png) { return binarize(to_gray(decode_png(png))); }

BinaryImage canny_edges(const GrayImage& g, int low, int high) {
  const int w = g.width, h = g.height;
  auto px = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return static_cast<int>(g.pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)]);
  };
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<int> gx(n), gy(n), mag(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
      gx[i] = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
              (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
      gy[i] = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
              (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
      mag[i] = std::abs(gx[i]) + std::abs(gy[i]);
    }
  }
  auto m = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0;
    return mag[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
  };
  // 0 = suppressed, 1 = weak, 2 = strong.
  std::vector<std::uint8_t> cls(n, 0);
  constexpr double kTan22 = 0.41421356;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
      const int v = mag[i];
      if (v <= low) continue;
      const double ax = std::abs(gx[i]), ay = std::abs(gy[i]);
      int n1, n2;
      if (ay <= ax * kTan22) {
        n1 = m(x - 1, y), n2 = m(x + 1, y);
      } else if (ay >= ax / kTan22) {
        n1 = m(x, y - 1), n2 = m(x, y + 1);
      } else if ((gx[i] > 0) == (gy[i] > 0)) {
        n1 = m(x - 1, y - 1), n2 = m(x + 1, y + 1);
      } else {
        n1 = m(x + 1, y - 1), n2 = m(x - 1, y + 1);
      }
      if (v > n1 && v >= n2) cls[i] = v > high ? 2 : 1;
    }
  }
  BinaryImage out{w, h, std::vector<std::uint8_t>(n, 0)};
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i) {
    if (cls[i] == 2 && !out.bits[i]) {
      out.bits[i] = 1;
      stack.push_back(i);
    }
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const int x = static_cast<int>(k % static_cast<std::size_t>(w)), y = static_cast<int>(k / static_cast<std::size_t>(w));
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t j = static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) + static_cast<std::size_t>(nx);
          if (cls[j] && !out.bits[j]) {
            out.bits[j] = 1;
            stack.push_back(j);
          }
        }
      }
    }
  }
  return out;
}

namespace {

// Counter-clockwise on screen (y grows downwards), starting east.
constexpr std::array<int, 8> kDx = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr std::array<int, 8> kDy = {0, -1, -1, -1, 0, 1, 1, 1};

int direction(int fx, int fy, int tx, int ty) {
  for (int d = 0; d < 8; ++d) {
    if (fx + kDx[static_cast<std::size_t>(d)] == tx && fy + kDy[static_cast<std::size_t>(d)] == ty) return d;
  }
  return -1;
}

}  // namespace

std::vector<Contour> find_contours(const BinaryImage& img) {
  const int W = img.width + 2, H = img.height + 2;
  std::vector<int> f(static_cast<std::size_t>(W) * static_cast<std::size_t>(H), 0);
  auto at = [&](int x, int y) -> int& { return f[static_cast<std::size_t>(y) * static_cast<std::size_t>(W) + static_cast<std::size_t>(x)]; };
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) at(x + 1, y + 1) = img.at(x, y) ? 1 : 0;
  }

  std::vector<Contour> out;
  int nbd = 1;
  for (int y = 1; y < H - 1; ++y) {
    for (int x = 1; x < W - 1; ++x) {
      int sx, sy;
      ContourKind kind;
      if (at(x, y) == 1 && at(x - 1, y) == 0) {
        kind = ContourKind::outer;
        sx = x - 1, sy = y;
      } else if (at(x, y) >= 1 && at(x + 1, y) == 0) {
        kind = ContourKind::hole;
        sx = x + 1, sy = y;
      } else {
        continue;
      }
      ++nbd;
      Contour c;
      c.kind = kind;
      c.points.push_back({x - 1, y - 1});

      // Clockwise search around the start for the first non-zero neighbour.
      const int d0 = direction(x, y, sx, sy);
      int found = -1;
      for (int k = 0; k < 8; ++k) {
        const int d = (d0 - k + 8) % 8;
        if (at(x + kDx[static_cast<std::size_t>(d)], y + kDy[static_cast<std::size_t>(d)]) != 0) {
          found = d;
          break;
        }
      }
      if (found < 0) {
        at(x, y) = -nbd;
        out.push_back(std::move(c));
        continue;
      }
      const int x1 = x + kDx[static_cast<std::size_t>(found)], y1 = y + kDy[static_cast<std::size_t>(found)];
      int x2 = x1, y2 = y1, x3 = x, y3 = y;
      while (true) {
        // Counter-clockwise search around (x3, y3), starting after (x2, y2).
        const int from = direction(x3, y3, x2, y2);
        bool east_zero = false;
        int x4 = x2, y4 = y2;
        for (int k = 1; k <= 8; ++k) {
          const int d = (from + k) % 8;
          const int nx = x3 + kDx[static_cast<std::size_t>(d)], ny = y3 + kDy[static_cast<std::size_t>(d)];
          if (at(nx, ny) != 0) {
            x4 = nx, y4 = ny;
            break;
          }
          if (d == 0) east_zero = true;
        }
        if (east_zero) {
          at(x3, y3) = -nbd;
        } else if (at(x3, y3) == 1) {
          at(x3, y3) = nbd;
        }
        if (x4 == x && y4 == y && x3 == x1 && y3 == y1) break;
        x2 = x3, y2 = y3;
        x3 = x4, y3 = y4;
        c.points.push_back({x3 - 1, y3 - 1});
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

double shoelace_area(const Contour& c) {
  const auto& p = c.points;
  if (p.size() < 3) return 0.0;
  long long twice = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point a = p[i];
    const Point b = p[(i + 1) % p.size()];
    twice += static_cast<long long>(a.x) * b.y - static_cast<long long>(b.x) * a.y;
  }
  return std::abs(static_cast<double>(twice)) / 2.0;
}

double bounding_rect_area(const Contour& c) {
  if (c.points.empty()) return 0.0;
  int x0 = c.points[0].x, x1 = x0, y0 = c.points[0].y, y1 = y0;
  for (const Point p : c.points) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return static_cast<double>(x1 - x0 + 1) * static_cast<double>(y1 - y0 + 1);
}

ContourProfile profile_from_contours(const std::vector<Contour>& contours) {
  ContourProfile p;
  p.count = contours.size();
  double y = 0, y2 = 0, z = 0, z2 = 0;
  for (const Contour& c : contours) {
    const double yi = shoelace_area(c);
    const double zi = bounding_rect_area(c);
    y += yi;
    y2 += yi * yi;
    z += zi;
    z2 += zi * zi;
  }
  p.weighted_area = y > 0 ? y2 / y : 0.0;
  p.weighted_moment = z > 0 ? z2 / z : 0.0;
  p.gm = std::cbrt(static_cast<double>(p.count) * p.weighted_area * p.weighted_moment);
  return p;
}

ContourProfile contour_profile(const BinaryImage& img) { return profile_from_contours(find_contours(img)); }

ContourProfile screenshot_profile(std::string_view png, const VisualOptions& options) {
  const GrayImage g = to_gray(decode_png(png));
  return contour_profile(options.canny ? canny_edges(g) : binarize(g));
}

double visual_dissimilarity(const ContourProfile& a, const ContourProfile& b) {
  const double sum = a.gm + b.gm;
  if (sum <= 0.0) return 0.0;
  return std::abs(a.gm - b.gm) / (sum / 2.0);
}

double visual_similarity(const ContourProfile& a, const ContourProfile& b) {
  return 1.0 - visual_dissimilarity(a, b) / 2.0;
}

}  // namespace uaradar
