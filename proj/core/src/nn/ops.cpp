#include "iodeep/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "iodeep/error.hpp"

namespace iodeep::nn {

Tensor::Tensor(TensorShape s, std::vector<float> values) : shape(std::move(s)), data(std::move(values)) {
  if (data.size() != shape.volume()) {
    throw Error(Errc::ShapeMismatch, "tensor data length " + std::to_string(data.size()) +
                                         " does not match shape " + shape.str());
  }
}

bool Tensor::all_finite() const {
  return std::all_of(data.begin(), data.end(), [](float v) { return std::isfinite(v); });
}

}  // namespace iodeep::nn

namespace iodeep::nn::ops {

namespace {

void require_rank3(const Tensor& t, const char* op) {
  if (t.shape.rank() != 3) {
    throw Error(Errc::ShapeMismatch, std::string(op) + " needs a (C,H,W) tensor, got " + t.shape.str());
  }
}

void require_shape(const Tensor& t, const TensorShape& expected, const char* what) {
  if (t.shape != expected) {
    throw Error(Errc::ShapeMismatch, std::string(what) + " has shape " + t.shape.str() +
                                         ", expected " + expected.str());
  }
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, Pair stride,
              Padding padding) {
  require_rank3(input, "conv2d");
  if (weight.shape.rank() != 4 || weight.shape[1] != input.shape.channels()) {
    throw Error(Errc::ShapeMismatch, "conv2d weight " + weight.shape.str() + " does not fit input " +
                                         input.shape.str());
  }
  const std::uint32_t out_c = weight.shape[0];
  const std::uint32_t in_c = weight.shape[1];
  const std::uint32_t kh = weight.shape[2];
  const std::uint32_t kw = weight.shape[3];
  require_shape(bias, TensorShape{out_c}, "conv2d bias");
  const std::uint32_t in_h = input.shape.height();
  const std::uint32_t in_w = input.shape.width();
  const std::uint32_t out_h = conv_output_dim(in_h, kh, stride[0], padding);
  const std::uint32_t out_w = conv_output_dim(in_w, kw, stride[1], padding);
  if (out_h < 1 || out_w < 1) throw Error(Errc::ShapeUnderflow, "conv2d output would be empty");
  const long pad_top = padding == Padding::Same ? same_padding_before(in_h, kh, stride[0]) : 0;
  const long pad_left = padding == Padding::Same ? same_padding_before(in_w, kw, stride[1]) : 0;

  Tensor out(TensorShape{out_c, out_h, out_w});
  for (std::uint32_t oc = 0; oc < out_c; ++oc) {
    float* plane = out.data.data() + std::size_t{oc} * out_h * out_w;
    std::fill(plane, plane + std::size_t{out_h} * out_w, bias.data[oc]);
    for (std::uint32_t ic = 0; ic < in_c; ++ic) {
      const float* src = input.data.data() + std::size_t{ic} * in_h * in_w;
      for (std::uint32_t ky = 0; ky < kh; ++ky) {
        for (std::uint32_t kx = 0; kx < kw; ++kx) {
          const float w = weight.data[((std::size_t{oc} * in_c + ic) * kh + ky) * kw + kx];
          for (std::uint32_t oy = 0; oy < out_h; ++oy) {
            const long iy = static_cast<long>(oy) * stride[0] + ky - pad_top;
            if (iy < 0 || iy >= static_cast<long>(in_h)) continue;
            const float* row = src + iy * in_w;
            float* dst = plane + std::size_t{oy} * out_w;
            for (std::uint32_t ox = 0; ox < out_w; ++ox) {
              const long ix = static_cast<long>(ox) * stride[1] + kx - pad_left;
              if (ix < 0 || ix >= static_cast<long>(in_w)) continue;
              dst[ox] += w * row[ix];
            }
          }
        }
      }
    }
  }
  return out;
}

Tensor transposed_conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias,
                         Pair stride, Padding padding) {
  require_rank3(input, "transposed_conv2d");
  if (weight.shape.rank() != 4 || weight.shape[1] != input.shape.channels()) {
    throw Error(Errc::ShapeMismatch, "transposed_conv2d weight " + weight.shape.str() +
                                         " does not fit input " + input.shape.str());
  }
  const std::uint32_t out_c = weight.shape[0];
  const std::uint32_t in_c = weight.shape[1];
  const std::uint32_t kh = weight.shape[2];
  const std::uint32_t kw = weight.shape[3];
  require_shape(bias, TensorShape{out_c}, "transposed_conv2d bias");
  const std::uint32_t in_h = input.shape.height();
  const std::uint32_t in_w = input.shape.width();
  const std::uint32_t full_h = (in_h - 1) * stride[0] + kh;
  const std::uint32_t full_w = (in_w - 1) * stride[1] + kw;
  const std::uint32_t out_h = transposed_conv_output_dim(in_h, kh, stride[0], padding);
  const std::uint32_t out_w = transposed_conv_output_dim(in_w, kw, stride[1], padding);
  const long crop_top = static_cast<long>(full_h - out_h) / 2;
  const long crop_left = static_cast<long>(full_w - out_w) / 2;

  Tensor out(TensorShape{out_c, out_h, out_w});
  for (std::uint32_t oc = 0; oc < out_c; ++oc) {
    float* plane = out.data.data() + std::size_t{oc} * out_h * out_w;
    std::fill(plane, plane + std::size_t{out_h} * out_w, bias.data[oc]);
    for (std::uint32_t ic = 0; ic < in_c; ++ic) {
      const float* src = input.data.data() + std::size_t{ic} * in_h * in_w;
      for (std::uint32_t iy = 0; iy < in_h; ++iy) {
        for (std::uint32_t ix = 0; ix < in_w; ++ix) {
          const float v = src[std::size_t{iy} * in_w + ix];
          for (std::uint32_t ky = 0; ky < kh; ++ky) {
            const long oy = static_cast<long>(iy) * stride[0] + ky - crop_top;
            if (oy < 0 || oy >= static_cast<long>(out_h)) continue;
            for (std::uint32_t kx = 0; kx < kw; ++kx) {
              const long ox = static_cast<long>(ix) * stride[1] + kx - crop_left;
              if (ox < 0 || ox >= static_cast<long>(out_w)) continue;
              plane[oy * out_w + ox] +=
                  v * weight.data[((std::size_t{oc} * in_c + ic) * kh + ky) * kw + kx];
            }
          }
        }
      }
    }
  }
  return out;
}

Tensor max_pool2d(const Tensor& input, Pair kernel, Pair stride) {
  require_rank3(input, "max_pool2d");
  const auto c = input.shape.channels();
  const auto in_h = input.shape.height();
  const auto in_w = input.shape.width();
  const auto out_h = conv_output_dim(in_h, kernel[0], stride[0], Padding::Valid);
  const auto out_w = conv_output_dim(in_w, kernel[1], stride[1], Padding::Valid);
  if (out_h < 1 || out_w < 1) throw Error(Errc::ShapeUnderflow, "max_pool2d output would be empty");
  Tensor out(TensorShape{c, out_h, out_w});
  for (std::uint32_t ch = 0; ch < c; ++ch) {
    for (std::uint32_t oy = 0; oy < out_h; ++oy) {
      for (std::uint32_t ox = 0; ox < out_w; ++ox) {
        float m = -std::numeric_limits<float>::infinity();
        for (std::uint32_t ky = 0; ky < kernel[0]; ++ky) {
          for (std::uint32_t kx = 0; kx < kernel[1]; ++kx) {
            m = std::max(m, input.at(ch, oy * stride[0] + ky, ox * stride[1] + kx));
          }
        }
        out.at(ch, oy, ox) = m;
      }
    }
  }
  return out;
}

Tensor upsample_nearest(const Tensor& input, std::uint32_t scale) {
  require_rank3(input, "upsample_nearest");
  const auto c = input.shape.channels();
  const auto h = input.shape.height();
  const auto w = input.shape.width();
  Tensor out(TensorShape{c, h * scale, w * scale});
  for (std::uint32_t ch = 0; ch < c; ++ch) {
    for (std::uint32_t y = 0; y < h * scale; ++y) {
      for (std::uint32_t x = 0; x < w * scale; ++x) {
        out.at(ch, y, x) = input.at(ch, y / scale, x / scale);
      }
    }
  }
  return out;
}

Tensor batch_norm(const Tensor& input, const Tensor& gamma, const Tensor& beta, const Tensor& mean,
                  const Tensor& variance, float epsilon) {
  const auto c = input.shape[0];
  const TensorShape per_channel{c};
  require_shape(gamma, per_channel, "batch_norm weight");
  require_shape(beta, per_channel, "batch_norm bias");
  require_shape(mean, per_channel, "batch_norm running_mean");
  require_shape(variance, per_channel, "batch_norm running_var");
  Tensor out = input;
  const std::size_t plane = input.shape.volume() / c;
  for (std::uint32_t ch = 0; ch < c; ++ch) {
    const float scale = gamma.data[ch] / std::sqrt(variance.data[ch] + epsilon);
    const float shift = beta.data[ch] - mean.data[ch] * scale;
    float* p = out.data.data() + ch * plane;
    for (std::size_t i = 0; i < plane; ++i) p[i] = p[i] * scale + shift;
  }
  return out;
}

Tensor relu(Tensor input) {
  for (auto& v : input.data) v = v > 0.0f ? v : 0.0f;
  return input;
}

Tensor sigmoid(Tensor input) {
  for (auto& v : input.data) {
    // Split on sign so exp never overflows.
    if (v >= 0.0f) {
      v = 1.0f / (1.0f + std::exp(-v));
    } else {
      const float e = std::exp(v);
      v = e / (1.0f + e);
    }
  }
  return input;
}

Tensor softmax(Tensor input) {
  const std::size_t c = input.shape[0];
  const std::size_t plane = input.shape.volume() / c;
  for (std::size_t i = 0; i < plane; ++i) {
    float m = -std::numeric_limits<float>::infinity();
    for (std::size_t ch = 0; ch < c; ++ch) m = std::max(m, input.data[ch * plane + i]);
    float sum = 0.0f;
    for (std::size_t ch = 0; ch < c; ++ch) {
      float& v = input.data[ch * plane + i];
      v = std::exp(v - m);
      sum += v;
    }
    for (std::size_t ch = 0; ch < c; ++ch) input.data[ch * plane + i] /= sum;
  }
  return input;
}

Tensor concat(std::span<const Tensor* const> inputs) {
  if (inputs.empty()) throw Error(Errc::ShapeMismatch, "concat of nothing");
  const auto& first = *inputs.front();
  require_rank3(first, "concat");
  std::uint32_t channels = 0;
  for (const auto* t : inputs) {
    require_rank3(*t, "concat");
    if (t->shape.height() != first.shape.height() || t->shape.width() != first.shape.width()) {
      throw Error(Errc::ConcatSpatialMismatch,
                  "concat inputs " + first.shape.str() + " and " + t->shape.str());
    }
    channels += t->shape.channels();
  }
  Tensor out(TensorShape{channels, first.shape.height(), first.shape.width()});
  auto dst = out.data.begin();
  for (const auto* t : inputs) dst = std::copy(t->data.begin(), t->data.end(), dst);
  return out;
}

Tensor dense(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  const auto in_features = static_cast<std::uint32_t>(input.shape.volume());
  if (weight.shape.rank() != 2 || weight.shape[1] != in_features) {
    throw Error(Errc::ShapeMismatch, "dense weight " + weight.shape.str() + " does not fit " +
                                         std::to_string(in_features) + " input features");
  }
  const auto out_features = weight.shape[0];
  require_shape(bias, TensorShape{out_features}, "dense bias");
  Tensor out(TensorShape{out_features});
  for (std::uint32_t o = 0; o < out_features; ++o) {
    float acc = bias.data[o];
    const float* w = weight.data.data() + std::size_t{o} * in_features;
    for (std::uint32_t i = 0; i < in_features; ++i) acc += w[i] * input.data[i];
    out.data[o] = acc;
  }
  return out;
}

}  // namespace iodeep::nn::ops
