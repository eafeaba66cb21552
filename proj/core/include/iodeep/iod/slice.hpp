#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iodeep/dicom/dataset.hpp"

namespace iodeep::iod {

/// Attributes of the current slice that drive network selection.
struct SliceTagSet {
  std::string modality;
  std::uint32_t samples_per_pixel = 1;
  std::optional<std::string> body_part_examined;
  std::optional<std::string> study_description;

  friend bool operator==(const SliceTagSet&, const SliceTagSet&) = default;
};

/// Body part absent or empty means the study description is used instead.
/// Throws Error(MissingTag) for Modality or SamplesPerPixel.
SliceTagSet slice_tags_of(const dicom::DataSet& image);

/// Image Pixel module attributes used for the input-tensor check.
struct PixelMeta {
  std::uint32_t samples_per_pixel = 1;
  std::uint32_t rows = 0;
  std::uint32_t columns = 0;
  std::string photometric_interpretation = "MONOCHROME2";
  std::uint32_t pixel_representation = 0;
  std::uint32_t bits_allocated = 16;
  std::uint32_t bits_stored = 16;
  std::uint32_t planar_configuration = 0;

  friend bool operator==(const PixelMeta&, const PixelMeta&) = default;
};

/// Throws Error(MissingTag) when Rows/Columns/SamplesPerPixel/
/// PhotometricInterpretation are absent.
PixelMeta pixel_meta_of(const dicom::DataSet& image);

/// Raw slice pixels plus their description.
struct PixelSlice {
  PixelMeta meta;
  std::vector<std::uint8_t> data;
};

PixelSlice pixel_slice_of(const dicom::DataSet& image);

/// Parameters for a single-frame image instance.
struct ImageSpec {
  std::string sop_class_uid;
  std::string sop_instance_uid;
  std::string study_instance_uid;
  std::string series_instance_uid;
  std::string frame_of_reference_uid;
  std::string modality = "MR";
  std::string body_part_examined;
  std::string study_description;
  std::string patient_name;
  std::string patient_id;
  std::string patient_birth_date;
  std::string patient_sex;
  std::string study_date;
  std::string study_time;
  std::string accession_number;
  std::string institution_name;
  std::string referring_physician_name;
  std::string study_id;
  std::uint32_t instance_number = 1;
  PixelMeta pixel;
  /// Little-endian sample data matching `pixel`.
  std::vector<std::uint8_t> pixel_data;
};

/// Builds an image instance (Patient, General Study/Series, Frame of
/// Reference, Image Pixel). Throws Error(PixelLengthMismatch).
dicom::DataSet build_image(const ImageSpec& spec);

/// Expected pixel payload size in bytes.
std::size_t pixel_bytes(const PixelMeta& meta);

}  // namespace iodeep::iod
