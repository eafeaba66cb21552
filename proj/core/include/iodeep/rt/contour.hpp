#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iodeep/nn/tensor.hpp"

namespace iodeep::rt {

struct Point {
  double x = 0;  // column
  double y = 0;  // row

  friend bool operator==(const Point&, const Point&) = default;
};

/// Closed contour in native pixel coordinates; the last point connects back
/// to the first.
struct RoiPolyline {
  std::string slice_ref_uid;
  std::vector<Point> points;
  std::string label;

  friend bool operator==(const RoiPolyline&, const RoiPolyline&) = default;
};

/// Shoelace area in (x, y) coordinates; positive for the orientation this
/// module emits.
double signed_area(const std::vector<Point>& points);

struct ContourOptions {
  float threshold = 0.5f;
  std::uint32_t min_area = 16;
  /// Native slice size when the mask was predicted at model resolution; the
  /// mask is mapped back by nearest-neighbour sampling first.
  std::optional<std::uint32_t> native_rows;
  std::optional<std::uint32_t> native_columns;
  std::string slice_ref_uid;
  std::string label_prefix = "ROI";
};

/// One polyline per 4-connected component of {mask >= threshold} whose
/// area is at least min_area. Each polyline follows the component's outer
/// pixel-edge boundary, with collinear vertices dropped, and has positive
/// signed area. Components are ordered by their first pixel in raster order.
/// `mask` is (H, W) or (1, H, W).
std::vector<RoiPolyline> mask_to_polylines(const nn::Tensor& mask, const ContourOptions& options = {});

/// Row-major 0/1 image of the pixels whose centres lie inside the polygon
/// (even-odd rule).
std::vector<std::uint8_t> rasterize(const std::vector<Point>& polygon, std::uint32_t rows,
                                    std::uint32_t columns);

/// Mean mask value over the pixels rasterize() selects; 0 when none are.
double mean_inside(const nn::Tensor& mask, const std::vector<Point>& polygon);

}  // namespace iodeep::rt
