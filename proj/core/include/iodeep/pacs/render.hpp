#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "iodeep/dicom/dataset.hpp"

namespace iodeep::pacs {

struct Window {
  double center = 0;
  double width = 1;
};

/// Window from WindowCenter/WindowWidth, else the full stored range.
Window default_window(const dicom::DataSet& image);

/// 8-bit PNG of an image instance. Monochrome samples go through the
/// linear VOI window (MONOCHROME1 inverted); RGB keeps its channels,
/// scaled to 8 bits. Throws Error(UnsupportedPhotometric),
/// Error(PixelLengthMismatch), Error(MissingTag).
std::vector<std::uint8_t> render_png(const dicom::DataSet& image, std::optional<Window> window = {});

/// Windowed 8-bit value of one stored sample.
std::uint8_t apply_window(double value, const Window& window);

}  // namespace iodeep::pacs
