#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "iodeep/nn/tensor.hpp"

// Forward operators over (C, H, W) tensors. Weight layouts follow the
// weights file: convolutions (out, in, kh, kw), dense (out, in).
namespace iodeep::nn::ops {

using Pair = std::array<std::uint32_t, 2>;

/// Cross-correlation with zero padding; "same" pads the extra pixel of an
/// odd total on the bottom/right.
Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, Pair stride,
              Padding padding);

/// Adjoint of conv2d: each input pixel scatters a weighted kernel into the
/// output at stride spacing. "same" crops the full result to in*stride,
/// dropping the leading half of the overlap.
Tensor transposed_conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias,
                         Pair stride, Padding padding);

Tensor max_pool2d(const Tensor& input, Pair kernel, Pair stride);
Tensor upsample_nearest(const Tensor& input, std::uint32_t scale);

/// Inference-mode batch normalization with running statistics.
Tensor batch_norm(const Tensor& input, const Tensor& gamma, const Tensor& beta,
                  const Tensor& mean, const Tensor& variance, float epsilon);

Tensor relu(Tensor input);
Tensor sigmoid(Tensor input);
/// Softmax along axis 0 (channels) for every remaining position.
Tensor softmax(Tensor input);

/// Channel-axis concatenation; spatial dims must agree.
Tensor concat(std::span<const Tensor* const> inputs);

/// Flattens the input and applies weight (out, in) plus bias (out).
Tensor dense(const Tensor& input, const Tensor& weight, const Tensor& bias);

}  // namespace iodeep::nn::ops
