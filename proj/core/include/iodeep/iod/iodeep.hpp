#pragma once

#include <array>
#include <span>
#include <cstdint>
#include <string>
#include <string_view>

#include "iodeep/dicom/dataset.hpp"

namespace iodeep::iod {

/// SOP class assigned to IODeep instances in this closed system.
inline constexpr std::string_view kIODeepSOPClassUID = "1.2.826.0.1.3680043.10.1147.1";

/// Private creator reserving the DNN module block in group 0017.
inline constexpr std::string_view kPrivateCreator = "IODEEP";
inline constexpr std::uint16_t kDnnGroup = 0x0017;
/// Block byte used when writing; readers look the creator up.
inline constexpr std::uint16_t kDefaultBlock = 0x10;

/// Offsets of the DNN module attributes inside the private block.
enum class DnnAttribute : std::uint8_t {
  Architecture = 0x00,
  Weights = 0x01,
  Name = 0x02,
  Uid = 0x03,
};

dicom::Tag dnn_tag(DnnAttribute attribute, std::uint16_t block = kDefaultBlock);

/// Typed view of one IODeep instance.
struct IODeepDescriptor {
  std::string dnn_architecture;
  /// URI of the weights payload ("pacs:weights/<uid>.iodw", a file path,
  /// file://, or an inline data: URI).
  std::string dnn_weights;
  std::string dnn_name;
  std::string dnn_uid;
  std::string photometric_interpretation = "MONOCHROME2";
  std::uint32_t samples_per_pixel = 1;
  std::array<std::string, 2> patient_orientation{"L", "P"};
  std::uint32_t planar_configuration = 0;
  std::string study_instance_uid;
  std::string series_instance_uid;
  std::string modality;
  std::string body_part_examined;

  friend bool operator==(const IODeepDescriptor&, const IODeepDescriptor&) = default;
};

/// Fills study and series UIDs from the DNN UID.
IODeepDescriptor make_descriptor(std::string dnn_uid, std::string name, std::string architecture,
                                 std::string weights, std::string modality,
                                 std::string body_part, std::uint32_t samples_per_pixel = 1,
                                 std::string photometric = "MONOCHROME2");

/// Checks UID syntax, UID sharing and the samples/photometric pairing.
/// Throws Error(InvalidUID), Error(UIDMismatch) or Error(InconsistentPixelSpec).
void validate(const IODeepDescriptor& desc);

/// Throws what validate() throws.
dicom::DataSet build_iodeep(const IODeepDescriptor& desc);

/// Throws Error(NotIODeep), Error(MissingTag), Error(UIDMismatch).
IODeepDescriptor parse_iodeep(const dicom::DataSet& ds);

bool is_iodeep(const dicom::DataSet& ds);

/// Patient-module attributes written empty into every instance.
std::span<const dicom::Tag> empty_patient_tags();

}  // namespace iodeep::iod
