#include "iodeep/iod/slice.hpp"

#include "iodeep/dicom/tags.hpp"
#include "iodeep/error.hpp"

namespace iodeep::iod {

using dicom::DataSet;
using dicom::Tag;
using dicom::VR;
namespace tags = dicom::tags;

namespace {

std::uint32_t required_uint(const DataSet& ds, Tag tag) {
  auto v = ds.uint(tag);
  if (!v) throw Error(Errc::MissingTag, "missing tag " + tag.str());
  return *v;
}

void set_optional_text(DataSet& ds, Tag tag, const std::string& value) {
  ds.set_text(tag, *tags::dictionary_vr(tag), value);
}

}  // namespace

SliceTagSet slice_tags_of(const DataSet& image) {
  SliceTagSet s;
  const auto modality = image.text(tags::Modality);
  if (!modality) throw Error(Errc::MissingTag, "missing tag " + tags::Modality.str());
  s.modality = *modality;
  s.samples_per_pixel = required_uint(image, tags::SamplesPerPixel);
  if (auto body = image.text(tags::BodyPartExamined); body && !body->empty()) {
    s.body_part_examined = std::move(*body);
  }
  if (auto desc = image.text(tags::StudyDescription); desc && !desc->empty()) {
    s.study_description = std::move(*desc);
  }
  return s;
}

PixelMeta pixel_meta_of(const DataSet& image) {
  PixelMeta m;
  m.samples_per_pixel = required_uint(image, tags::SamplesPerPixel);
  m.rows = required_uint(image, tags::Rows);
  m.columns = required_uint(image, tags::Columns);
  const auto photometric = image.text(tags::PhotometricInterpretation);
  if (!photometric) throw Error(Errc::MissingTag, "missing tag " + tags::PhotometricInterpretation.str());
  m.photometric_interpretation = *photometric;
  m.pixel_representation = image.uint(tags::PixelRepresentation).value_or(0);
  m.bits_allocated = image.uint(tags::BitsAllocated).value_or(16);
  m.bits_stored = image.uint(tags::BitsStored).value_or(m.bits_allocated);
  m.planar_configuration = image.uint(tags::PlanarConfiguration).value_or(0);
  return m;
}

std::size_t pixel_bytes(const PixelMeta& meta) {
  return std::size_t{meta.rows} * meta.columns * meta.samples_per_pixel * (meta.bits_allocated / 8);
}

PixelSlice pixel_slice_of(const DataSet& image) {
  PixelSlice s{pixel_meta_of(image), {}};
  const auto* data = image.bytes(tags::PixelData);
  if (!data) throw Error(Errc::MissingTag, "missing tag " + tags::PixelData.str());
  s.data = *data;
  const auto expected = pixel_bytes(s.meta);
  // Pixel data may carry one byte of even-length padding.
  if (s.data.size() == expected + 1) s.data.pop_back();
  if (s.data.size() != expected) {
    throw Error(Errc::PixelLengthMismatch, "pixel data has " + std::to_string(s.data.size()) +
                                               " bytes, expected " + std::to_string(expected));
  }
  return s;
}

DataSet build_image(const ImageSpec& spec) {
  if (spec.pixel.bits_allocated != 8 && spec.pixel.bits_allocated != 16) {
    throw Error(Errc::InconsistentPixelSpec, "BitsAllocated must be 8 or 16");
  }
  if (spec.pixel_data.size() != pixel_bytes(spec.pixel)) {
    throw Error(Errc::PixelLengthMismatch, "pixel data does not match rows x columns x samples");
  }
  DataSet ds;
  ds.set_text(tags::SOPClassUID, VR::UI, spec.sop_class_uid);
  ds.set_text(tags::SOPInstanceUID, VR::UI, spec.sop_instance_uid);
  set_optional_text(ds, tags::StudyDate, spec.study_date);
  set_optional_text(ds, tags::StudyTime, spec.study_time);
  set_optional_text(ds, tags::AccessionNumber, spec.accession_number);
  ds.set_text(tags::Modality, VR::CS, spec.modality);
  set_optional_text(ds, tags::InstitutionName, spec.institution_name);
  set_optional_text(ds, tags::ReferringPhysicianName, spec.referring_physician_name);
  set_optional_text(ds, tags::StudyDescription, spec.study_description);
  set_optional_text(ds, tags::PatientName, spec.patient_name);
  set_optional_text(ds, tags::PatientID, spec.patient_id);
  set_optional_text(ds, tags::PatientBirthDate, spec.patient_birth_date);
  set_optional_text(ds, tags::PatientSex, spec.patient_sex);
  set_optional_text(ds, tags::BodyPartExamined, spec.body_part_examined);
  ds.set_text(tags::StudyInstanceUID, VR::UI, spec.study_instance_uid);
  ds.set_text(tags::SeriesInstanceUID, VR::UI, spec.series_instance_uid);
  set_optional_text(ds, tags::StudyID, spec.study_id);
  ds.set_text(tags::InstanceNumber, VR::IS, std::to_string(spec.instance_number));
  ds.set_text(tags::FrameOfReferenceUID, VR::UI, spec.frame_of_reference_uid);
  ds.set_empty(tags::PositionReferenceIndicator, VR::LO);

  const auto& p = spec.pixel;
  ds.set_uint(tags::SamplesPerPixel, VR::US, p.samples_per_pixel);
  ds.set_text(tags::PhotometricInterpretation, VR::CS, p.photometric_interpretation);
  if (p.samples_per_pixel > 1) ds.set_uint(tags::PlanarConfiguration, VR::US, p.planar_configuration);
  ds.set_uint(tags::Rows, VR::US, p.rows);
  ds.set_uint(tags::Columns, VR::US, p.columns);
  ds.set_uint(tags::BitsAllocated, VR::US, p.bits_allocated);
  ds.set_uint(tags::BitsStored, VR::US, p.bits_stored);
  ds.set_uint(tags::HighBit, VR::US, p.bits_stored - 1);
  ds.set_uint(tags::PixelRepresentation, VR::US, p.pixel_representation);
  ds.set_bytes(tags::PixelData, p.bits_allocated == 8 ? VR::OB : VR::OW, spec.pixel_data);
  return ds;
}

}  // namespace iodeep::iod
