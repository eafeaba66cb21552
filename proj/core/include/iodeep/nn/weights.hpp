#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iodeep/nn/tensor.hpp"

namespace iodeep::nn {

inline constexpr std::uint32_t kWeightsFormatVersion = 1;

/// Named float32 arrays. Layer `L` owns `L.weight`, `L.bias` and, for batch
/// norm, `L.running_mean` / `L.running_var`.
struct WeightStore {
  std::map<std::string, Tensor, std::less<>> entries;
  std::uint32_t format_version = kWeightsFormatVersion;

  const Tensor* find(std::string_view name) const;
  std::size_t parameter_count() const;

  friend bool operator==(const WeightStore&, const WeightStore&) = default;
};

/// "IODW" container: magic, version, count, entries sorted by name, CRC-32.
std::vector<std::uint8_t> encode_weights(const WeightStore& store);

/// Throws Error(ChecksumMismatch) for truncated or corrupted payloads,
/// Error(FormatVersionUnsupported) and Error(MalformedWeights).
WeightStore decode_weights(std::span<const std::uint8_t> bytes);

/// Accepts a plain path, a file:// URI or an inline
/// data:...;base64, URI. Throws Error(WeightsNotFound) for anything that
/// cannot be resolved locally.
WeightStore load_weights(std::string_view locator);

void save_weights(const WeightStore& store, const std::filesystem::path& path);

/// data: URI embedding a weights payload, for self-contained instances.
std::string inline_weights_uri(std::span<const std::uint8_t> payload);

}  // namespace iodeep::nn
