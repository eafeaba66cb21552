#include "iodeep/nn/model.hpp"

#include "iodeep/error.hpp"
#include "iodeep/nn/ops.hpp"

namespace iodeep::nn {

namespace {

const Tensor& param(const Model& m, const LayerSpec& l, const char* suffix) {
  return m.weights().entries.at(l.id + suffix);
}

Tensor run_layer(const Model& m, const LayerSpec& l, const std::map<std::string, Tensor>& values) {
  const Tensor& in = values.at(l.inputs.front());
  switch (l.kind) {
    case LayerKind::Conv2d:
      return ops::conv2d(in, param(m, l, ".weight"), param(m, l, ".bias"), l.stride, l.padding);
    case LayerKind::TransposedConv2d:
      return ops::transposed_conv2d(in, param(m, l, ".weight"), param(m, l, ".bias"), l.stride, l.padding);
    case LayerKind::MaxPool2d: return ops::max_pool2d(in, l.kernel, l.stride);
    case LayerKind::UpsampleNearest: return ops::upsample_nearest(in, l.scale);
    case LayerKind::BatchNorm:
      return ops::batch_norm(in, param(m, l, ".weight"), param(m, l, ".bias"),
                             param(m, l, ".running_mean"), param(m, l, ".running_var"), l.epsilon);
    case LayerKind::Activation:
      switch (l.activation) {
        case ActivationFn::Relu: return ops::relu(in);
        case ActivationFn::Sigmoid: return ops::sigmoid(in);
        case ActivationFn::Softmax: return ops::softmax(in);
      }
      break;
    case LayerKind::Concat: {
      std::vector<const Tensor*> parts;
      for (const auto& src : l.inputs) parts.push_back(&values.at(src));
      return ops::concat(parts);
    }
    case LayerKind::Dense: return ops::dense(in, param(m, l, ".weight"), param(m, l, ".bias"));
  }
  throw Error(Errc::InvalidState, "unhandled layer kind");
}

}  // namespace

std::vector<std::pair<std::string, TensorShape>> expected_weights(const LayerSpec& l,
                                                                  const TensorShape& input) {
  switch (l.kind) {
    case LayerKind::Conv2d:
    case LayerKind::TransposedConv2d:
      return {{l.id + ".weight", TensorShape{l.out_channels, input[0], l.kernel[0], l.kernel[1]}},
              {l.id + ".bias", TensorShape{l.out_channels}}};
    case LayerKind::BatchNorm: {
      const TensorShape c{input[0]};
      return {{l.id + ".weight", c}, {l.id + ".bias", c}, {l.id + ".running_mean", c},
              {l.id + ".running_var", c}};
    }
    case LayerKind::Dense:
      return {{l.id + ".weight", TensorShape{l.out_channels, static_cast<std::uint32_t>(input.volume())}},
              {l.id + ".bias", TensorShape{l.out_channels}}};
    default: return {};
  }
}

Model create_model(NetworkDescriptor net, WeightStore weights) {
  Model m;
  m.shapes_ = infer_shapes(net);
  for (const auto& l : net.layers) {
    const auto& input = m.shapes_.at(l.inputs.front());
    for (const auto& [name, shape] : expected_weights(l, input)) {
      const auto* t = weights.find(name);
      if (!t) throw Error(Errc::MissingWeight, "layer '" + l.id + "' has no weight entry '" + name + "'");
      if (t->shape != shape) {
        throw Error(Errc::WeightShapeMismatch, "layer '" + l.id + "': '" + name + "' expected " +
                                                   shape.str() + ", found " + t->shape.str());
      }
    }
    m.order_.push_back(l.id);
  }
  m.descriptor_ = std::move(net);
  m.weights_ = std::move(weights);
  return m;
}

std::map<std::string, Tensor> predict_all(const Model& model, const Tensor& image) {
  if (image.shape != model.input_shape()) {
    throw Error(Errc::ShapeMismatch, "image " + image.shape.str() + " does not match network input " +
                                         model.input_shape().str());
  }
  std::map<std::string, Tensor> values;
  values.emplace(std::string(kInputId), image);
  for (const auto& l : model.descriptor().layers) {
    auto out = run_layer(model, l, values);
    if (!out.all_finite()) {
      throw Error(Errc::InvalidState, "layer '" + l.id + "' produced non-finite values");
    }
    values.insert_or_assign(l.id, std::move(out));
  }
  return values;
}

Tensor predict(const Model& model, const Tensor& image) {
  if (image.shape != model.input_shape()) {
    throw Error(Errc::ShapeMismatch, "image " + image.shape.str() + " does not match network input " +
                                         model.input_shape().str());
  }
  const auto& layers = model.descriptor().layers;
  if (layers.empty()) return image;
  // Keep a tensor only while a later layer still reads it.
  std::map<std::string, std::size_t> last_use;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    for (const auto& src : layers[i].inputs) last_use[src] = i;
  }
  std::map<std::string, Tensor> values;
  values.emplace(std::string(kInputId), image);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    auto out = run_layer(model, layers[i], values);
    if (!out.all_finite()) {
      throw Error(Errc::InvalidState, "layer '" + layers[i].id + "' produced non-finite values");
    }
    for (const auto& src : layers[i].inputs) {
      if (last_use[src] == i) values.erase(src);
    }
    values.insert_or_assign(layers[i].id, std::move(out));
  }
  return std::move(values.at(layers.back().id));
}

}  // namespace iodeep::nn
