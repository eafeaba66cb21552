#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "iodeep/dicom/dataset.hpp"

namespace iodeep::dicom {

inline constexpr std::string_view kExplicitVRLittleEndian = "1.2.840.10008.1.2.1";

/// Warnings collected while decoding. Decoding never fails on these.
struct DecodeDiagnostics {
  /// A tag was not strictly greater than its predecessor. The element is
  /// kept; a later duplicate replaces the earlier one.
  bool non_monotonic_tags = false;
  std::size_t non_monotonic_count = 0;
};

/// Explicit VR Little Endian body encoding with explicit-length sequences.
/// Throws Error(UnsupportedTransferSyntax) for any other syntax,
/// Error(OddGroupWithoutPrivateCreator) for an orphan private element and
/// Error(ValueTooLong) when a short-length VR exceeds 65534 bytes.
std::vector<std::uint8_t> encode_dataset(const DataSet& ds,
                                         std::string_view transfer_syntax = kExplicitVRLittleEndian);

/// Inverse of encode_dataset. Also accepts undefined-length sequences and
/// items. Throws Error(TruncatedStream) and Error(UnknownVR).
DataSet decode_dataset(std::span<const std::uint8_t> bytes,
                       std::string_view transfer_syntax = kExplicitVRLittleEndian,
                       DecodeDiagnostics* diagnostics = nullptr);

}  // namespace iodeep::dicom
