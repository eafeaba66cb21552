#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace iodeep::dicom {

enum class VR : std::uint8_t {
  UT, PN, UI, CS, US, UL, SQ, DS, IS, LO, SH, DA, TM, OB, OW, FL, FD,
};

enum class ValueKind : std::uint8_t { Text, Integer, Decimal, Bytes, Sequence };

struct VRTraits {
  /// true: 2 reserved bytes + 32-bit length; false: 16-bit length.
  bool long_length;
  char padding;
  ValueKind kind;
  /// Bytes per binary value for US/UL/FL/FD, 0 otherwise.
  std::uint8_t value_size;
  /// Text VRs that allow backslash-separated multiplicity.
  bool multi_valued;
};

VRTraits traits(VR vr) noexcept;
std::string_view code(VR vr) noexcept;
std::optional<VR> vr_from_code(std::string_view code) noexcept;

}  // namespace iodeep::dicom
