#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace uaradar {

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
};

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // row-major, foreground = 1

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] != 0; }
  std::size_t foreground() const;
};

// Alpha is composited onto white. Throws DecodeError.
RgbImage decode_png(std::string_view bytes);
std::string encode_png(const RgbImage& img);

// Rec.601 luma in integer arithmetic, rounded half up.
GrayImage to_gray(const RgbImage& img);

// Otsu threshold t; pixels <= t form the darker (foreground) class. A
// single-valued histogram returns 255 with `uniform` set, meaning no
// foreground.
struct OtsuResult {
  int threshold = 0;
  bool uniform = false;
};
OtsuResult otsu_threshold(const GrayImage& g);

BinaryImage binarize(const GrayImage& g);
BinaryImage binarize_otsu(std::string_view png);

// Edge mask (Sobel gradient, non-maximum suppression, hysteresis).
BinaryImage canny_edges(const GrayImage& g, int low = 50, int high = 150);

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(Point, Point) = default;
};

enum class ContourKind { outer, hole };

struct Contour {
  std::vector<Point> points;
  ContourKind kind = ContourKind::outer;
};

// Suzuki-Abe border following with 8-connectivity; every outer and hole
// border in raster discovery order. Pixels outside the image count as
// background.
std::vector<Contour> find_contours(const BinaryImage& img);

double shoelace_area(const Contour& c);
double bounding_rect_area(const Contour& c);  // (max - min + 1) per axis

struct ContourProfile {
  std::size_t count = 0;
  double weighted_area = 0.0;    // sum(Y_i^2) / sum(Y_i)
  double weighted_moment = 0.0;  // sum(Z_i^2) / sum(Z_i)
  double gm = 0.0;               // cbrt(count * A * M)

  friend bool operator==(const ContourProfile&, const ContourProfile&) = default;
};

ContourProfile profile_from_contours(const std::vector<Contour>& contours);
ContourProfile contour_profile(const BinaryImage& img);

struct VisualOptions {
  bool canny = false;
};

ContourProfile screenshot_profile(std::string_view png, const VisualOptions& options = {});

// |GM1 - GM2| / ((GM1 + GM2) / 2), in [0, 2]; 0 when both are 0.
double visual_dissimilarity(const ContourProfile& a, const ContourProfile& b);
// 1 - dissimilarity / 2.
double visual_similarity(const ContourProfile& a, const ContourProfile& b);

}  // namespace uaradar
