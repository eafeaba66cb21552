#pragma once

#include <string>
#include <string_view>

namespace iodeep::dicom {

inline constexpr std::string_view kRTStructureSetStorage = "1.2.840.10008.5.1.4.1.1.481.3";
inline constexpr std::string_view kMRImageStorage = "1.2.840.10008.5.1.4.1.1.4";
inline constexpr std::string_view kCTImageStorage = "1.2.840.10008.5.1.4.1.1.2";
inline constexpr std::string_view kSecondaryCaptureImageStorage = "1.2.840.10008.5.1.4.1.1.7";

/// Digits and dots only, no empty component, no leading zero unless the
/// component is "0", at most 64 characters.
bool is_valid_uid(std::string_view uid) noexcept;

/// Random UID under the 2.25 (UUID-derived) root.
std::string generate_uid();

/// Deterministic UID under `root` with a decimal suffix.
std::string make_uid(std::string_view root, unsigned long long suffix);

}  // namespace iodeep::dicom
