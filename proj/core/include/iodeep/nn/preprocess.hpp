#pragma once

#include <cstdint>
#include <vector>

#include "iodeep/iod/slice.hpp"
#include "iodeep/nn/netdesc.hpp"
#include "iodeep/nn/tensor.hpp"

namespace iodeep::nn {

/// Stored sample values as (samples, rows, columns), sign-extended and
/// masked to BitsStored. Throws what decode_pixels() throws.
std::vector<std::int64_t> decode_samples(const iod::PixelSlice& slice);

/// Decodes raw samples into a (samples, rows, columns) float tensor scaled
/// to [0, 1] with higher values brighter.
///
/// Unsigned samples are divided by 2^BitsStored - 1. Signed samples are
/// shifted by the slice minimum and divided by the slice range (a flat
/// slice maps to 0). MONOCHROME1 is inverted afterwards. Throws
/// Error(PixelLengthMismatch) and Error(UnsupportedPhotometric).
Tensor decode_pixels(const iod::PixelSlice& slice);

/// decode_pixels, then the channel adaptation and resize of `plan`.
Tensor preprocess(const iod::PixelSlice& slice, const ReshapePlan& plan);

/// Half-pixel-centre bilinear resize of every channel, edges clamped.
Tensor resize_bilinear(const Tensor& image, std::uint32_t height, std::uint32_t width);
/// Nearest-neighbour resize of every channel, same sampling grid.
Tensor resize_nearest(const Tensor& image, std::uint32_t height, std::uint32_t width);

/// 3 -> 1 channels with weights 0.299, 0.587, 0.114.
Tensor to_luminance(const Tensor& rgb);
/// 1 -> 3 channels by copying the plane.
Tensor replicate_channels(const Tensor& gray, std::uint32_t channels);

}  // namespace iodeep::nn
