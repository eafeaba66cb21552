#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "iodeep/iod/slice.hpp"

namespace iodeep::nn {

/// Channels-first dimensions, rank 1 to 4, every dimension >= 1.
class TensorShape {
 public:
  TensorShape() = default;
  /// Throws Error(ShapeMismatch) when the rank or a dimension is invalid.
  TensorShape(std::initializer_list<std::uint32_t> dims);
  explicit TensorShape(std::vector<std::uint32_t> dims);

  const std::vector<std::uint32_t>& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  std::uint32_t operator[](std::size_t i) const { return dims_[i]; }
  std::size_t volume() const;

  /// (C, H, W) accessors; valid for rank 3 shapes.
  std::uint32_t channels() const { return dims_[0]; }
  std::uint32_t height() const { return dims_[1]; }
  std::uint32_t width() const { return dims_[2]; }

  std::string str() const;

  friend bool operator==(const TensorShape&, const TensorShape&) = default;

 private:
  std::vector<std::uint32_t> dims_;
};

enum class LayerKind : std::uint8_t {
  Conv2d,
  TransposedConv2d,
  MaxPool2d,
  UpsampleNearest,
  BatchNorm,
  Activation,
  Concat,
  Dense,
};

enum class ActivationFn : std::uint8_t { Relu, Sigmoid, Softmax };
enum class Padding : std::uint8_t { Same, Valid };

std::string_view kind_name(LayerKind kind);
std::string_view activation_name(ActivationFn fn);

/// Reserved id naming the network input in `LayerSpec::inputs`.
inline constexpr std::string_view kInputId = "input";

struct LayerSpec {
  std::string id;
  LayerKind kind = LayerKind::Activation;
  std::array<std::uint32_t, 2> kernel{1, 1};
  std::array<std::uint32_t, 2> stride{1, 1};
  Padding padding = Padding::Valid;
  /// conv2d / transposed_conv2d output channels, dense output features.
  std::uint32_t out_channels = 0;
  std::uint32_t scale = 1;
  ActivationFn activation = ActivationFn::Relu;
  float epsilon = 1e-5f;
  /// Resolved producers: the preceding layer (or kInputId), then skip
  /// sources for concat layers in declaration order.
  std::vector<std::string> inputs;

  bool parametric() const {
    return kind == LayerKind::Conv2d || kind == LayerKind::TransposedConv2d ||
           kind == LayerKind::BatchNorm || kind == LayerKind::Dense;
  }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct SkipConnection {
  std::string from;
  std::string to;

  friend bool operator==(const SkipConnection&, const SkipConnection&) = default;
};

/// Parsed architecture: layers in document order, each fed by its
/// predecessor, concat layers additionally fed by skip connections. The
/// last layer is the single output.
struct NetworkDescriptor {
  TensorShape input_shape;
  std::vector<LayerSpec> layers;
  std::vector<SkipConnection> skip_connections;

  /// Id of the output layer, kInputId for an empty network.
  std::string output_id() const;
  const LayerSpec* find(std::string_view id) const;

  friend bool operator==(const NetworkDescriptor&, const NetworkDescriptor&) = default;
};

/// Throws Error(MalformedDocument), Error(UnknownLayerKind),
/// Error(DanglingSkipConnection), Error(CyclicGraph).
NetworkDescriptor parse_architecture(std::string_view document);

/// Canonical document; parse_architecture(serialize_architecture(n)) == n.
std::string serialize_architecture(const NetworkDescriptor& net, int indent = 2);

using ShapeMap = std::map<std::string, TensorShape, std::less<>>;

/// Output shape of every layer, plus kInputId. Throws Error(ShapeUnderflow),
/// Error(ConcatSpatialMismatch), Error(ShapeMismatch).
ShapeMap infer_shapes(const NetworkDescriptor& net);

TensorShape output_shape(const NetworkDescriptor& net);

// Shape arithmetic shared by inference and the engine.
std::uint32_t conv_output_dim(std::uint32_t in, std::uint32_t kernel, std::uint32_t stride,
                              Padding padding);
std::uint32_t transposed_conv_output_dim(std::uint32_t in, std::uint32_t kernel,
                                         std::uint32_t stride, Padding padding);
/// Leading zero padding of a "same" convolution; the extra pixel of an odd
/// total goes to the bottom/right.
std::uint32_t same_padding_before(std::uint32_t in, std::uint32_t kernel, std::uint32_t stride);

enum class ReshapeAction : std::uint8_t { None, Resize, ChannelAdaptThenResize };
enum class ChannelAdapt : std::uint8_t { None, Replicate, Luminance };
enum class Interpolation : std::uint8_t { Bilinear, Nearest };

struct ReshapePlan {
  ReshapeAction action = ReshapeAction::None;
  ChannelAdapt channel_adapt = ChannelAdapt::None;
  /// Network input, (C, H, W).
  TensorShape target;
  /// Whether the spatial dims differ; false means the resize is a no-op.
  bool resize_spatial = false;
  Interpolation interpolation = Interpolation::Bilinear;

  friend bool operator==(const ReshapePlan&, const ReshapePlan&) = default;
};

/// Compares the slice's (samples, rows, columns) with the network input.
/// Rank-2 input shapes are read as (H, W) with one channel. Throws
/// Error(UnsupportedPhotometric) and Error(ShapeMismatch).
ReshapePlan check_tensor_shape(const iod::PixelMeta& pixel, const TensorShape& input_shape);

}  // namespace iodeep::nn
