#include "iodeep/nn/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "iodeep/error.hpp"

namespace iodeep::nn {

namespace {

std::int64_t read_sample(const std::vector<std::uint8_t>& data, std::size_t index,
                         const iod::PixelMeta& meta) {
  std::uint32_t raw = 0;
  if (meta.bits_allocated == 8) {
    raw = data[index];
  } else {
    raw = static_cast<std::uint32_t>(data[2 * index] | (data[2 * index + 1] << 8));
  }
  const std::uint32_t bits = std::clamp<std::uint32_t>(meta.bits_stored, 1, meta.bits_allocated);
  const std::uint32_t mask = bits >= 32 ? 0xFFFFFFFFu : ((1u << bits) - 1u);
  raw &= mask;
  if (meta.pixel_representation == 1 && (raw & (1u << (bits - 1)))) {
    return static_cast<std::int64_t>(raw) - (std::int64_t{1} << bits);
  }
  return raw;
}

std::pair<double, double> source_coord(std::uint32_t dst, std::uint32_t in, std::uint32_t out) {
  const double s = (dst + 0.5) * static_cast<double>(in) / out - 0.5;
  return {std::clamp(s, 0.0, static_cast<double>(in - 1)), s};
}

}  // namespace

std::vector<std::int64_t> decode_samples(const iod::PixelSlice& slice) {
  const auto& m = slice.meta;
  const auto& pi = m.photometric_interpretation;
  const bool mono = pi == "MONOCHROME1" || pi == "MONOCHROME2";
  if (!(mono && m.samples_per_pixel == 1) && !(pi == "RGB" && m.samples_per_pixel == 3)) {
    throw Error(Errc::UnsupportedPhotometric, "cannot decode '" + pi + "' pixels");
  }
  if (m.bits_allocated != 8 && m.bits_allocated != 16) {
    throw Error(Errc::UnsupportedPhotometric, "BitsAllocated must be 8 or 16");
  }
  if (m.rows < 1 || m.columns < 1) throw Error(Errc::PixelLengthMismatch, "slice has no pixels");
  if (slice.data.size() != iod::pixel_bytes(m)) {
    throw Error(Errc::PixelLengthMismatch, "pixel data has " + std::to_string(slice.data.size()) +
                                               " bytes, expected " + std::to_string(iod::pixel_bytes(m)));
  }

  const std::uint32_t c = m.samples_per_pixel;
  const std::size_t plane = std::size_t{m.rows} * m.columns;
  std::vector<std::int64_t> samples(plane * c);
  for (std::uint32_t ch = 0; ch < c; ++ch) {
    for (std::size_t p = 0; p < plane; ++p) {
      // Planar configuration 0 interleaves samples per pixel.
      const std::size_t src = (c == 1 || m.planar_configuration == 1) ? ch * plane + p : p * c + ch;
      samples[ch * plane + p] = read_sample(slice.data, src, m);
    }
  }
  return samples;
}

Tensor decode_pixels(const iod::PixelSlice& slice) {
  const auto& m = slice.meta;
  const auto& pi = m.photometric_interpretation;
  const std::uint32_t c = m.samples_per_pixel;
  const auto samples = decode_samples(slice);

  double offset = 0.0;
  double range = 1.0;
  if (m.pixel_representation == 1) {
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    offset = static_cast<double>(*lo);
    range = static_cast<double>(*hi - *lo);
  } else {
    const std::uint32_t bits = std::clamp<std::uint32_t>(m.bits_stored, 1, m.bits_allocated);
    range = static_cast<double>((std::uint64_t{1} << bits) - 1);
  }

  Tensor out(TensorShape{c, m.rows, m.columns});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double v = range > 0 ? (static_cast<double>(samples[i]) - offset) / range : 0.0;
    v = std::clamp(v, 0.0, 1.0);
    if (pi == "MONOCHROME1") v = 1.0 - v;
    out.data[i] = static_cast<float>(v);
  }
  return out;
}

Tensor to_luminance(const Tensor& rgb) {
  if (rgb.shape.rank() != 3 || rgb.shape.channels() != 3) {
    throw Error(Errc::ShapeMismatch, "luminance needs a 3-channel image");
  }
  const auto h = rgb.shape.height();
  const auto w = rgb.shape.width();
  Tensor out(TensorShape{1, h, w});
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      out.at(0, y, x) = 0.299f * rgb.at(0, y, x) + 0.587f * rgb.at(1, y, x) + 0.114f * rgb.at(2, y, x);
    }
  }
  return out;
}

Tensor replicate_channels(const Tensor& gray, std::uint32_t channels) {
  if (gray.shape.rank() != 3 || gray.shape.channels() != 1) {
    throw Error(Errc::ShapeMismatch, "replication needs a 1-channel image");
  }
  Tensor out(TensorShape{channels, gray.shape.height(), gray.shape.width()});
  for (std::uint32_t ch = 0; ch < channels; ++ch) {
    std::copy(gray.data.begin(), gray.data.end(), out.data.begin() + ch * gray.data.size());
  }
  return out;
}

Tensor resize_bilinear(const Tensor& image, std::uint32_t height, std::uint32_t width) {
  const auto c = image.shape.channels();
  const auto in_h = image.shape.height();
  const auto in_w = image.shape.width();
  if (in_h == height && in_w == width) return image;
  Tensor out(TensorShape{c, height, width});
  for (std::uint32_t y = 0; y < height; ++y) {
    const double sy = source_coord(y, in_h, height).first;
    const auto y0 = static_cast<std::uint32_t>(std::floor(sy));
    const auto y1 = std::min(y0 + 1, in_h - 1);
    const double fy = sy - y0;
    for (std::uint32_t x = 0; x < width; ++x) {
      const double sx = source_coord(x, in_w, width).first;
      const auto x0 = static_cast<std::uint32_t>(std::floor(sx));
      const auto x1 = std::min(x0 + 1, in_w - 1);
      const double fx = sx - x0;
      for (std::uint32_t ch = 0; ch < c; ++ch) {
        const double top = image.at(ch, y0, x0) * (1 - fx) + image.at(ch, y0, x1) * fx;
        const double bottom = image.at(ch, y1, x0) * (1 - fx) + image.at(ch, y1, x1) * fx;
        out.at(ch, y, x) = static_cast<float>(top * (1 - fy) + bottom * fy);
      }
    }
  }
  return out;
}

Tensor resize_nearest(const Tensor& image, std::uint32_t height, std::uint32_t width) {
  const auto c = image.shape.channels();
  const auto in_h = image.shape.height();
  const auto in_w = image.shape.width();
  if (in_h == height && in_w == width) return image;
  Tensor out(TensorShape{c, height, width});
  for (std::uint32_t y = 0; y < height; ++y) {
    const auto sy = std::min<std::uint32_t>(
        static_cast<std::uint32_t>((y + 0.5) * in_h / height), in_h - 1);
    for (std::uint32_t x = 0; x < width; ++x) {
      const auto sx = std::min<std::uint32_t>(
          static_cast<std::uint32_t>((x + 0.5) * in_w / width), in_w - 1);
      for (std::uint32_t ch = 0; ch < c; ++ch) out.at(ch, y, x) = image.at(ch, sy, sx);
    }
  }
  return out;
}

Tensor preprocess(const iod::PixelSlice& slice, const ReshapePlan& plan) {
  Tensor t = decode_pixels(slice);
  if (plan.action == ReshapeAction::ChannelAdaptThenResize) {
    if (plan.channel_adapt == ChannelAdapt::Luminance) {
      t = to_luminance(t);
    } else if (plan.channel_adapt == ChannelAdapt::Replicate) {
      t = replicate_channels(t, plan.target.channels());
    }
  }
  if (t.shape.channels() != plan.target.channels()) {
    throw Error(Errc::ShapeMismatch, "reshape plan does not match the slice's channels");
  }
  if (plan.interpolation == Interpolation::Nearest) {
    t = resize_nearest(t, plan.target.height(), plan.target.width());
  } else {
    t = resize_bilinear(t, plan.target.height(), plan.target.width());
  }
  return Tensor(plan.target, std::move(t.data));
}

}  // namespace iodeep::nn
