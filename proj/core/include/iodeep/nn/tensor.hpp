#pragma once

#include <span>
#include <vector>

#include "iodeep/nn/netdesc.hpp"

namespace iodeep::nn {

/// Dense row-major float32 array; data.size() == shape.volume().
struct Tensor {
  TensorShape shape;
  std::vector<float> data;

  Tensor() = default;
  /// Zero-filled.
  explicit Tensor(TensorShape s) : shape(std::move(s)), data(shape.volume(), 0.0f) {}
  /// Throws Error(ShapeMismatch) when the lengths disagree.
  Tensor(TensorShape s, std::vector<float> values);

  std::size_t size() const { return data.size(); }
  std::span<float> values() { return data; }
  std::span<const float> values() const { return data; }

  /// (c, y, x) element of a rank-3 tensor.
  float& at(std::size_t c, std::size_t y, std::size_t x) {
    return data[(c * shape[1] + y) * shape[2] + x];
  }
  float at(std::size_t c, std::size_t y, std::size_t x) const {
    return data[(c * shape[1] + y) * shape[2] + x];
  }

  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

}  // namespace iodeep::nn
