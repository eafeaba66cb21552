#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace iodeep::dicom {

struct Tag {
  std::uint16_t group = 0;
  std::uint16_t element = 0;

  constexpr Tag() = default;
  constexpr Tag(std::uint16_t g, std::uint16_t e) : group(g), element(e) {}

  constexpr std::uint32_t combined() const {
    return (std::uint32_t{group} << 16) | element;
  }
  constexpr bool is_private() const { return (group & 1u) != 0; }
  /// (gggg,0010)-(gggg,00FF) in an odd group.
  constexpr bool is_private_creator() const {
    return is_private() && element >= 0x0010 && element <= 0x00FF;
  }
  /// For a private data element (gggg,xxee), the creator slot (gggg,00xx).
  constexpr Tag private_creator_slot() const {
    return Tag(group, static_cast<std::uint16_t>(element >> 8));
  }

  friend constexpr auto operator<=>(const Tag&, const Tag&) = default;

  /// "(GGGG, EEEE)", uppercase hex.
  std::string str() const;
};

}  // namespace iodeep::dicom
