#include "iodeep/pacs/render.hpp"

#include <algorithm>
#include <cmath>

#include <png.h>

#include "iodeep/dicom/tags.hpp"
#include "iodeep/error.hpp"
#include "iodeep/iod/slice.hpp"
#include "iodeep/nn/preprocess.hpp"

namespace iodeep::pacs {

namespace tags = dicom::tags;

namespace {

std::vector<std::uint8_t> encode_png(const std::vector<std::uint8_t>& pixels, std::uint32_t rows,
                                     std::uint32_t columns, int channels) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(Errc::InvalidState, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(Errc::InvalidState, "libpng initialisation failed");
  }
  std::vector<std::uint8_t> out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(Errc::InvalidState, "PNG encoding failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t length) {
        auto* buffer = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
        buffer->insert(buffer->end(), data, data + length);
      },
      nullptr);
  png_set_IHDR(png, info, columns, rows, 8, channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = std::size_t{columns} * channels;
  for (std::uint32_t r = 0; r < rows; ++r) {
    png_write_row(png, const_cast<png_bytep>(pixels.data() + r * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace

std::uint8_t apply_window(double value, const Window& w) {
  // Linear VOI function with the half-unit offsets of the DICOM definition.
  const double width = std::max(w.width, 1.0);
  const double lo = w.center - 0.5 - (width - 1) / 2;
  const double hi = w.center - 0.5 + (width - 1) / 2;
  if (value <= lo) return 0;
  if (value > hi) return 255;
  const double y = ((value - (w.center - 0.5)) / (width - 1) + 0.5) * 255.0;
  return static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

Window default_window(const dicom::DataSet& image) {
  const auto center = image.decimals(tags::WindowCenter);
  const auto width = image.decimals(tags::WindowWidth);
  if (center && width && !center->empty() && !width->empty() && width->front() >= 1) {
    return {center->front(), width->front()};
  }
  const auto samples = nn::decode_samples(iod::pixel_slice_of(image));
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  const double low = static_cast<double>(*lo);
  const double high = static_cast<double>(*hi);
  return {(low + high + 1) / 2, std::max(high - low + 1, 1.0)};
}

std::vector<std::uint8_t> render_png(const dicom::DataSet& image, std::optional<Window> window) {
  const auto slice = iod::pixel_slice_of(image);
  const auto& m = slice.meta;
  const auto samples = nn::decode_samples(slice);
  const std::size_t plane = std::size_t{m.rows} * m.columns;
  if (m.samples_per_pixel == 3) {
    const int shift = std::max<int>(0, static_cast<int>(m.bits_stored) - 8);
    std::vector<std::uint8_t> rgb(plane * 3);
    for (std::size_t p = 0; p < plane; ++p) {
      for (int ch = 0; ch < 3; ++ch) {
        rgb[p * 3 + ch] = static_cast<std::uint8_t>(std::clamp<std::int64_t>(samples[ch * plane + p] >> shift, 0, 255));
      }
    }
    return encode_png(rgb, m.rows, m.columns, 3);
  }
  const auto w = window ? *window : default_window(image);
  const bool invert = m.photometric_interpretation == "MONOCHROME1";
  std::vector<std::uint8_t> gray(plane);
  for (std::size_t p = 0; p < plane; ++p) {
    const auto v = apply_window(static_cast<double>(samples[p]), w);
    gray[p] = invert ? static_cast<std::uint8_t>(255 - v) : v;
  }
  return encode_png(gray, m.rows, m.columns, 1);
}

}  // namespace iodeep::pacs
