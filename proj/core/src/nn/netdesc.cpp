#include "iodeep/nn/netdesc.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "iodeep/error.hpp"

namespace iodeep::nn {

using nlohmann::json;

TensorShape::TensorShape(std::initializer_list<std::uint32_t> dims)
    : TensorShape(std::vector<std::uint32_t>(dims)) {}

TensorShape::TensorShape(std::vector<std::uint32_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty() || dims_.size() > 4) {
    throw Error(Errc::ShapeMismatch, "tensor rank must be 1..4, got " + std::to_string(dims_.size()));
  }
  for (auto d : dims_) {
    if (d == 0) throw Error(Errc::ShapeUnderflow, "tensor dimension must be >= 1");
  }
}

std::size_t TensorShape::volume() const {
  std::size_t v = dims_.empty() ? 0 : 1;
  for (auto d : dims_) v *= d;
  return v;
}

std::string TensorShape::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims_[i]);
  }
  return s + ")";
}

std::string_view kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv2d: return "conv2d";
    case LayerKind::TransposedConv2d: return "transposed_conv2d";
    case LayerKind::MaxPool2d: return "max_pool2d";
    case LayerKind::UpsampleNearest: return "upsample_nearest";
    case LayerKind::BatchNorm: return "batch_norm";
    case LayerKind::Activation: return "activation";
    case LayerKind::Concat: return "concat";
    case LayerKind::Dense: return "dense";
  }
  return "?";
}

std::string_view activation_name(ActivationFn fn) {
  switch (fn) {
    case ActivationFn::Relu: return "relu";
    case ActivationFn::Sigmoid: return "sigmoid";
    case ActivationFn::Softmax: return "softmax";
  }
  return "?";
}

std::string NetworkDescriptor::output_id() const {
  return layers.empty() ? std::string(kInputId) : layers.back().id;
}

const LayerSpec* NetworkDescriptor::find(std::string_view id) const {
  for (const auto& l : layers) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(Errc::MalformedDocument, what);
}

std::uint32_t positive_int(const json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 0xFFFFFF) {
    malformed(what + " must be a positive integer");
  }
  return static_cast<std::uint32_t>(v.get<long long>());
}

std::array<std::uint32_t, 2> pair_param(const json& v, const std::string& what) {
  if (v.is_number_integer()) {
    auto x = positive_int(v, what);
    return {x, x};
  }
  if (!v.is_array() || v.size() != 2) malformed(what + " must be an integer or a pair");
  return {positive_int(v[0], what), positive_int(v[1], what)};
}

Padding padding_param(const json& v, const std::string& id) {
  if (v == "same") return Padding::Same;
  if (v == "valid") return Padding::Valid;
  malformed("layer '" + id + "': padding must be \"same\" or \"valid\"");
}

ActivationFn activation_param(const json& v, const std::string& id) {
  if (v == "relu") return ActivationFn::Relu;
  if (v == "sigmoid") return ActivationFn::Sigmoid;
  if (v == "softmax") return ActivationFn::Softmax;
  malformed("layer '" + id + "': unknown activation function " + v.dump());
}

void require_keys(const json& layer, const std::string& id, std::initializer_list<const char*> allowed,
                  std::initializer_list<const char*> required) {
  for (const auto& [key, _] : layer.items()) {
    if (key == "id" || key == "type") continue;
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
        allowed.end()) {
      malformed("layer '" + id + "': unexpected key '" + key + "'");
    }
  }
  for (const char* r : required) {
    if (!layer.contains(r)) malformed("layer '" + id + "': missing key '" + r + "'");
  }
}

LayerSpec parse_layer(const json& layer, std::size_t index) {
  if (!layer.is_object()) malformed("architecture entries must be objects");
  if (!layer.contains("type") || !layer["type"].is_string()) {
    malformed("architecture entry " + std::to_string(index) + " has no type");
  }
  const auto type = layer["type"].get<std::string>();
  LayerSpec spec;
  if (layer.contains("id")) {
    if (!layer["id"].is_string() || layer["id"].get<std::string>().empty()) malformed("layer id must be a non-empty string");
    spec.id = layer["id"].get<std::string>();
  } else {
    spec.id = type + "_" + std::to_string(index);
  }
  const auto& id = spec.id;

  if (type == "conv2d") {
    spec.kind = LayerKind::Conv2d;
    require_keys(layer, id, {"kernel", "stride", "padding", "out_channels"},
                 {"kernel", "stride", "padding", "out_channels"});
    spec.kernel = pair_param(layer["kernel"], "kernel");
    spec.stride = pair_param(layer["stride"], "stride");
    spec.padding = padding_param(layer["padding"], id);
    spec.out_channels = positive_int(layer["out_channels"], "out_channels");
  } else if (type == "transposed_conv2d") {
    spec.kind = LayerKind::TransposedConv2d;
    require_keys(layer, id, {"kernel", "stride", "padding", "out_channels"},
                 {"kernel", "stride", "out_channels"});
    spec.kernel = pair_param(layer["kernel"], "kernel");
    spec.stride = pair_param(layer["stride"], "stride");
    spec.padding = layer.contains("padding") ? padding_param(layer["padding"], id) : Padding::Valid;
    spec.out_channels = positive_int(layer["out_channels"], "out_channels");
    if (spec.padding == Padding::Same &&
        (spec.kernel[0] < spec.stride[0] || spec.kernel[1] < spec.stride[1])) {
      malformed("layer '" + id + "': \"same\" transposed convolution needs kernel >= stride");
    }
  } else if (type == "max_pool2d") {
    spec.kind = LayerKind::MaxPool2d;
    require_keys(layer, id, {"kernel", "stride"}, {"kernel"});
    spec.kernel = pair_param(layer["kernel"], "kernel");
    spec.stride = layer.contains("stride") ? pair_param(layer["stride"], "stride") : spec.kernel;
  } else if (type == "upsample_nearest") {
    spec.kind = LayerKind::UpsampleNearest;
    require_keys(layer, id, {"scale"}, {"scale"});
    spec.scale = positive_int(layer["scale"], "scale");
  } else if (type == "batch_norm") {
    spec.kind = LayerKind::BatchNorm;
    require_keys(layer, id, {"epsilon"}, {});
    if (layer.contains("epsilon")) {
      if (!layer["epsilon"].is_number() || layer["epsilon"].get<double>() <= 0) {
        malformed("layer '" + id + "': epsilon must be positive");
      }
      spec.epsilon = layer["epsilon"].get<float>();
    }
  } else if (type == "activation") {
    spec.kind = LayerKind::Activation;
    require_keys(layer, id, {"function"}, {"function"});
    spec.activation = activation_param(layer["function"], id);
  } else if (type == "relu" || type == "sigmoid" || type == "softmax") {
    spec.kind = LayerKind::Activation;
    require_keys(layer, id, {}, {});
    spec.activation = activation_param(json(type), id);
  } else if (type == "concat") {
    spec.kind = LayerKind::Concat;
    require_keys(layer, id, {}, {});
  } else if (type == "dense") {
    spec.kind = LayerKind::Dense;
    require_keys(layer, id, {"out_features"}, {"out_features"});
    spec.out_channels = positive_int(layer["out_features"], "out_features");
  } else {
    throw Error(Errc::UnknownLayerKind, "unknown layer kind '" + type + "'");
  }
  return spec;
}

json layer_to_json(const LayerSpec& l) {
  json j;
  j["id"] = l.id;
  j["type"] = std::string(kind_name(l.kind));
  auto pair = [](const std::array<std::uint32_t, 2>& p) { return json::array({p[0], p[1]}); };
  switch (l.kind) {
    case LayerKind::Conv2d:
    case LayerKind::TransposedConv2d:
      j["kernel"] = pair(l.kernel);
      j["stride"] = pair(l.stride);
      j["padding"] = l.padding == Padding::Same ? "same" : "valid";
      j["out_channels"] = l.out_channels;
      break;
    case LayerKind::MaxPool2d:
      j["kernel"] = pair(l.kernel);
      j["stride"] = pair(l.stride);
      break;
    case LayerKind::UpsampleNearest: j["scale"] = l.scale; break;
    case LayerKind::BatchNorm: j["epsilon"] = static_cast<double>(l.epsilon); break;
    case LayerKind::Activation: j["function"] = std::string(activation_name(l.activation)); break;
    case LayerKind::Concat: break;
    case LayerKind::Dense: j["out_features"] = l.out_channels; break;
  }
  return j;
}

TensorShape require_chw(const TensorShape& s, const LayerSpec& l) {
  if (s.rank() != 3) {
    throw Error(Errc::ShapeMismatch, "layer '" + l.id + "' (" + std::string(kind_name(l.kind)) +
                                         ") needs a (C,H,W) input, got " + s.str());
  }
  return s;
}

std::uint32_t checked(long long d, const LayerSpec& l) {
  if (d < 1) {
    throw Error(Errc::ShapeUnderflow,
                "layer '" + l.id + "' would produce a spatial dimension < 1");
  }
  return static_cast<std::uint32_t>(d);
}

}  // namespace

std::uint32_t conv_output_dim(std::uint32_t in, std::uint32_t kernel, std::uint32_t stride,
                              Padding padding) {
  if (padding == Padding::Same) return (in + stride - 1) / stride;
  if (kernel > in) return 0;
  return (in - kernel) / stride + 1;
}

std::uint32_t transposed_conv_output_dim(std::uint32_t in, std::uint32_t kernel,
                                         std::uint32_t stride, Padding padding) {
  if (padding == Padding::Same) return in * stride;
  return (in - 1) * stride + kernel;
}

std::uint32_t same_padding_before(std::uint32_t in, std::uint32_t kernel, std::uint32_t stride) {
  const std::uint32_t out = (in + stride - 1) / stride;
  const long long total = std::max<long long>(
      0, static_cast<long long>(out - 1) * stride + kernel - static_cast<long long>(in));
  return static_cast<std::uint32_t>(total / 2);
}

NetworkDescriptor parse_architecture(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    malformed(std::string("architecture document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) malformed("architecture document must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "input_shape" && key != "architecture" && key != "skip_connections" &&
        key != "skip_connection" && key != "name" && key != "description") {
      malformed("unexpected top-level key '" + key + "'");
    }
  }
  if (!doc.contains("input_shape") || !doc["input_shape"].is_array()) {
    malformed("missing integer list 'input_shape'");
  }
  if (!doc.contains("architecture") || !doc["architecture"].is_array()) {
    malformed("missing layer list 'architecture'");
  }

  NetworkDescriptor net;
  std::vector<std::uint32_t> dims;
  for (const auto& d : doc["input_shape"]) dims.push_back(positive_int(d, "input_shape entry"));
  if (dims.empty() || dims.size() > 4) malformed("input_shape rank must be 1..4");
  net.input_shape = TensorShape(std::move(dims));

  std::set<std::string, std::less<>> ids;
  for (std::size_t i = 0; i < doc["architecture"].size(); ++i) {
    auto layer = parse_layer(doc["architecture"][i], i);
    if (layer.id == kInputId) malformed("layer id 'input' is reserved");
    if (!ids.insert(layer.id).second) malformed("duplicate layer id '" + layer.id + "'");
    layer.inputs.push_back(i == 0 ? std::string(kInputId) : net.layers.back().id);
    net.layers.push_back(std::move(layer));
  }

  const char* skip_key = doc.contains("skip_connections") ? "skip_connections" : "skip_connection";
  if (doc.contains("skip_connections") && doc.contains("skip_connection")) {
    malformed("use either 'skip_connections' or 'skip_connection', not both");
  }
  if (doc.contains(skip_key)) {
    const auto& skips = doc[skip_key];
    if (!skips.is_array()) malformed("skip_connections must be a list");
    for (const auto& s : skips) {
      if (!s.is_object() || !s.contains("from") || !s.contains("to") || !s["from"].is_string() ||
          !s["to"].is_string() || s.size() != 2) {
        malformed("skip connection entries must be {\"from\": id, \"to\": id}");
      }
      SkipConnection sc{s["from"].get<std::string>(), s["to"].get<std::string>()};
      auto index_of = [&](const std::string& id) -> std::ptrdiff_t {
        for (std::size_t i = 0; i < net.layers.size(); ++i) {
          if (net.layers[i].id == id) return static_cast<std::ptrdiff_t>(i);
        }
        return -1;
      };
      const auto from = index_of(sc.from);
      const auto to = index_of(sc.to);
      if (from < 0 || to < 0) {
        throw Error(Errc::DanglingSkipConnection,
                    "skip connection " + sc.from + " -> " + sc.to + " references a missing layer");
      }
      if (net.layers[to].kind != LayerKind::Concat) {
        malformed("skip connection target '" + sc.to + "' is not a concat layer");
      }
      if (from >= to) {
        throw Error(Errc::CyclicGraph,
                    "skip connection " + sc.from + " -> " + sc.to + " does not point forward");
      }
      net.layers[to].inputs.push_back(sc.from);
      net.skip_connections.push_back(std::move(sc));
    }
  }
  for (const auto& l : net.layers) {
    if (l.kind == LayerKind::Concat && l.inputs.size() < 2) {
      malformed("concat layer '" + l.id + "' needs at least one skip connection");
    }
  }
  return net;
}

std::string serialize_architecture(const NetworkDescriptor& net, int indent) {
  json doc;
  doc["input_shape"] = net.input_shape.dims();
  doc["architecture"] = json::array();
  for (const auto& l : net.layers) doc["architecture"].push_back(layer_to_json(l));
  if (!net.skip_connections.empty()) {
    doc["skip_connections"] = json::array();
    for (const auto& s : net.skip_connections) {
      doc["skip_connections"].push_back({{"from", s.from}, {"to", s.to}});
    }
  }
  return doc.dump(indent);
}

ShapeMap infer_shapes(const NetworkDescriptor& net) {
  ShapeMap shapes;
  shapes.emplace(std::string(kInputId), net.input_shape);
  for (const auto& l : net.layers) {
    const auto& in = shapes.at(l.inputs.front());
    TensorShape out;
    switch (l.kind) {
      case LayerKind::Conv2d: {
        require_chw(in, l);
        const auto h = conv_output_dim(in.height(), l.kernel[0], l.stride[0], l.padding);
        const auto w = conv_output_dim(in.width(), l.kernel[1], l.stride[1], l.padding);
        out = TensorShape{l.out_channels, checked(h, l), checked(w, l)};
        break;
      }
      case LayerKind::TransposedConv2d: {
        require_chw(in, l);
        out = TensorShape{l.out_channels,
                          transposed_conv_output_dim(in.height(), l.kernel[0], l.stride[0], l.padding),
                          transposed_conv_output_dim(in.width(), l.kernel[1], l.stride[1], l.padding)};
        break;
      }
      case LayerKind::MaxPool2d: {
        require_chw(in, l);
        const auto h = conv_output_dim(in.height(), l.kernel[0], l.stride[0], Padding::Valid);
        const auto w = conv_output_dim(in.width(), l.kernel[1], l.stride[1], Padding::Valid);
        out = TensorShape{in.channels(), checked(h, l), checked(w, l)};
        break;
      }
      case LayerKind::UpsampleNearest:
        require_chw(in, l);
        out = TensorShape{in.channels(), in.height() * l.scale, in.width() * l.scale};
        break;
      case LayerKind::BatchNorm:
      case LayerKind::Activation: out = in; break;
      case LayerKind::Concat: {
        require_chw(in, l);
        std::uint32_t channels = 0;
        for (const auto& src : l.inputs) {
          const auto& s = shapes.at(src);
          if (s.rank() != 3 || s.height() != in.height() || s.width() != in.width()) {
            throw Error(Errc::ConcatSpatialMismatch, "concat '" + l.id + "': input '" + src + "' " +
                                                         s.str() + " vs " + in.str());
          }
          channels += s.channels();
        }
        out = TensorShape{channels, in.height(), in.width()};
        break;
      }
      case LayerKind::Dense: out = TensorShape{l.out_channels}; break;
    }
    shapes.insert_or_assign(l.id, std::move(out));
  }
  return shapes;
}

TensorShape output_shape(const NetworkDescriptor& net) {
  return infer_shapes(net).at(net.output_id());
}

ReshapePlan check_tensor_shape(const iod::PixelMeta& pixel, const TensorShape& input_shape) {
  const auto& pi = pixel.photometric_interpretation;
  const bool mono = pi == "MONOCHROME1" || pi == "MONOCHROME2";
  const bool rgb = pi == "RGB";
  if ((!mono && !rgb) || (mono && pixel.samples_per_pixel != 1) || (rgb && pixel.samples_per_pixel != 3)) {
    throw Error(Errc::UnsupportedPhotometric,
                "unsupported photometric interpretation '" + pi + "' with " +
                    std::to_string(pixel.samples_per_pixel) + " samples per pixel");
  }
  if (pixel.rows < 1 || pixel.columns < 1) {
    throw Error(Errc::ShapeMismatch, "slice has no pixels");
  }
  TensorShape target;
  if (input_shape.rank() == 3) {
    target = input_shape;
  } else if (input_shape.rank() == 2) {
    target = TensorShape{1, input_shape[0], input_shape[1]};
  } else {
    throw Error(Errc::ShapeMismatch, "network input " + input_shape.str() + " is not an image shape");
  }
  if (target.channels() != 1 && target.channels() != 3) {
    throw Error(Errc::ShapeMismatch, "network expects " + std::to_string(target.channels()) +
                                         " channels; only 1 or 3 can be adapted");
  }

  ReshapePlan plan;
  plan.target = target;
  plan.resize_spatial = pixel.rows != target.height() || pixel.columns != target.width();
  if (pixel.samples_per_pixel != target.channels()) {
    plan.action = ReshapeAction::ChannelAdaptThenResize;
    plan.channel_adapt = target.channels() == 3 ? ChannelAdapt::Replicate : ChannelAdapt::Luminance;
  } else if (plan.resize_spatial) {
    plan.action = ReshapeAction::Resize;
  }
  return plan;
}

}  // namespace iodeep::nn
