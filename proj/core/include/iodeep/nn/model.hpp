#pragma once

#include <map>
#include <string>
#include <vector>

#include "iodeep/nn/netdesc.hpp"
#include "iodeep/nn/tensor.hpp"
#include "iodeep/nn/weights.hpp"

namespace iodeep::nn {

/// Executable network: descriptor, validated weights and inferred shapes.
/// Immutable after create_model(); predict() may run concurrently.
class Model {
 public:
  const NetworkDescriptor& descriptor() const { return descriptor_; }
  const WeightStore& weights() const { return weights_; }
  const ShapeMap& shapes() const { return shapes_; }
  /// Layer ids in execution order.
  const std::vector<std::string>& execution_order() const { return order_; }
  const TensorShape& input_shape() const { return descriptor_.input_shape; }
  const TensorShape& output_shape() const { return shapes_.at(descriptor_.output_id()); }

 private:
  friend Model create_model(NetworkDescriptor net, WeightStore weights);
  Model() = default;

  NetworkDescriptor descriptor_;
  WeightStore weights_;
  ShapeMap shapes_;
  std::vector<std::string> order_;
};

/// Binds weights layer by layer. Throws Error(MissingWeight) and
/// Error(WeightShapeMismatch) naming the offending layer, plus whatever
/// infer_shapes() throws.
Model create_model(NetworkDescriptor net, WeightStore weights);

/// Weight entries a layer needs, with their shapes, given its input shape.
std::vector<std::pair<std::string, TensorShape>> expected_weights(const LayerSpec& layer,
                                                                  const TensorShape& input);

/// Forward pass. Throws Error(ShapeMismatch) when image.shape differs from
/// the network input.
Tensor predict(const Model& model, const Tensor& image);

/// Forward pass keeping every layer output, keyed by layer id (plus "input").
std::map<std::string, Tensor> predict_all(const Model& model, const Tensor& image);

}  // namespace iodeep::nn
