#include "iodeep/iod/iodeep.hpp"

#include "iodeep/dicom/tags.hpp"
#include "iodeep/dicom/uid.hpp"
#include "iodeep/error.hpp"

namespace iodeep::iod {

using dicom::DataSet;
using dicom::Tag;
using dicom::VR;
namespace tags = dicom::tags;

namespace {

constexpr std::array<Tag, 4> kPatientTags{tags::PatientName, tags::PatientID,
                                          tags::PatientBirthDate, tags::PatientSex};

// Type 2 General Study / Series attributes, present and empty.
constexpr std::array<std::pair<Tag, VR>, 6> kEmptyType2{{
    {tags::StudyDate, VR::DA},
    {tags::StudyTime, VR::TM},
    {tags::AccessionNumber, VR::SH},
    {tags::ReferringPhysicianName, VR::PN},
    {tags::StudyID, VR::SH},
    {tags::SeriesNumber, VR::IS},
}};

bool pixel_spec_consistent(const IODeepDescriptor& d) {
  if (d.photometric_interpretation == "RGB") return d.samples_per_pixel == 3;
  if (d.photometric_interpretation == "MONOCHROME1" || d.photometric_interpretation == "MONOCHROME2") {
    return d.samples_per_pixel == 1;
  }
  return false;
}

void require_uid(const std::string& uid, std::string_view what) {
  if (!dicom::is_valid_uid(uid)) {
    throw Error(Errc::InvalidUID, std::string(what) + " is not a valid UID: '" + uid + "'");
  }
}

std::optional<std::uint16_t> find_block(const DataSet& ds) {
  for (std::uint16_t slot = 0x10; slot <= 0xFF; ++slot) {
    const auto creator = ds.text(Tag(kDnnGroup, slot));
    if (creator && *creator == kPrivateCreator) return slot;
  }
  return std::nullopt;
}

std::string required_text(const DataSet& ds, Tag tag) {
  auto v = ds.text(tag);
  if (!v) throw Error(Errc::MissingTag, "missing tag " + tag.str());
  return *v;
}

std::uint32_t required_uint(const DataSet& ds, Tag tag) {
  auto v = ds.uint(tag);
  if (!v) throw Error(Errc::MissingTag, "missing tag " + tag.str());
  return *v;
}

}  // namespace

Tag dnn_tag(DnnAttribute attribute, std::uint16_t block) {
  return Tag(kDnnGroup, static_cast<std::uint16_t>((block << 8) | static_cast<std::uint16_t>(attribute)));
}

std::span<const Tag> empty_patient_tags() { return kPatientTags; }

IODeepDescriptor make_descriptor(std::string dnn_uid, std::string name, std::string architecture,
                                 std::string weights, std::string modality, std::string body_part,
                                 std::uint32_t samples_per_pixel, std::string photometric) {
  IODeepDescriptor d;
  d.dnn_uid = std::move(dnn_uid);
  d.study_instance_uid = d.dnn_uid;
  d.series_instance_uid = d.dnn_uid;
  d.dnn_name = std::move(name);
  d.dnn_architecture = std::move(architecture);
  d.dnn_weights = std::move(weights);
  d.modality = std::move(modality);
  d.body_part_examined = std::move(body_part);
  d.samples_per_pixel = samples_per_pixel;
  d.photometric_interpretation = std::move(photometric);
  return d;
}

void validate(const IODeepDescriptor& d) {
  require_uid(d.dnn_uid, "DnnUID");
  require_uid(d.study_instance_uid, "StudyInstanceUID");
  require_uid(d.series_instance_uid, "SeriesInstanceUID");
  if (d.study_instance_uid != d.dnn_uid || d.series_instance_uid != d.dnn_uid) {
    throw Error(Errc::UIDMismatch, "StudyInstanceUID and SeriesInstanceUID must equal DnnUID");
  }
  if (!pixel_spec_consistent(d)) {
    throw Error(Errc::InconsistentPixelSpec,
                "SamplesPerPixel " + std::to_string(d.samples_per_pixel) +
                    " does not match PhotometricInterpretation " + d.photometric_interpretation);
  }
  if (d.planar_configuration > 1) {
    throw Error(Errc::InconsistentPixelSpec, "PlanarConfiguration must be 0 or 1");
  }
  if (d.modality.empty()) throw Error(Errc::MissingTag, "Modality must not be empty");
}

DataSet build_iodeep(const IODeepDescriptor& d) {
  validate(d);
  DataSet ds;
  ds.set_text(tags::SOPClassUID, VR::UI, std::string(kIODeepSOPClassUID));
  ds.set_text(tags::SOPInstanceUID, VR::UI, d.dnn_uid);
  ds.set_text(tags::Modality, VR::CS, d.modality);
  for (const auto& [tag, vr] : kEmptyType2) ds.set_empty(tag, vr);
  for (const auto tag : kPatientTags) ds.set_empty(tag, *tags::dictionary_vr(tag));
  ds.set_text(tags::BodyPartExamined, VR::CS, d.body_part_examined);
  ds.set_text(tags::StudyInstanceUID, VR::UI, d.study_instance_uid);
  ds.set_text(tags::SeriesInstanceUID, VR::UI, d.series_instance_uid);
  ds.set_texts(tags::PatientOrientation, VR::CS,
               {d.patient_orientation[0], d.patient_orientation[1]});
  ds.set_uint(tags::SamplesPerPixel, VR::US, d.samples_per_pixel);
  ds.set_text(tags::PhotometricInterpretation, VR::CS, d.photometric_interpretation);
  ds.set_uint(tags::PlanarConfiguration, VR::US, d.planar_configuration);

  ds.set_text(Tag(kDnnGroup, kDefaultBlock), VR::LO, std::string(kPrivateCreator));
  ds.set_text(dnn_tag(DnnAttribute::Architecture), VR::UT, d.dnn_architecture);
  ds.set_text(dnn_tag(DnnAttribute::Weights), VR::UT, d.dnn_weights);
  ds.set_text(dnn_tag(DnnAttribute::Name), VR::PN, d.dnn_name);
  ds.set_text(dnn_tag(DnnAttribute::Uid), VR::UI, d.dnn_uid);
  return ds;
}

bool is_iodeep(const DataSet& ds) {
  return ds.text(tags::SOPClassUID) == std::string(kIODeepSOPClassUID) && find_block(ds).has_value();
}

IODeepDescriptor parse_iodeep(const DataSet& ds) {
  if (ds.text(tags::SOPClassUID) != std::string(kIODeepSOPClassUID)) {
    throw Error(Errc::NotIODeep, "SOPClassUID is not the IODeep class");
  }
  const auto block = find_block(ds);
  if (!block) throw Error(Errc::NotIODeep, "no IODEEP private creator in group 0017");

  IODeepDescriptor d;
  d.dnn_architecture = required_text(ds, dnn_tag(DnnAttribute::Architecture, *block));
  d.dnn_weights = required_text(ds, dnn_tag(DnnAttribute::Weights, *block));
  d.dnn_name = required_text(ds, dnn_tag(DnnAttribute::Name, *block));
  d.dnn_uid = required_text(ds, dnn_tag(DnnAttribute::Uid, *block));
  d.photometric_interpretation = required_text(ds, tags::PhotometricInterpretation);
  d.samples_per_pixel = required_uint(ds, tags::SamplesPerPixel);
  d.planar_configuration = required_uint(ds, tags::PlanarConfiguration);
  const auto orientation = ds.texts(tags::PatientOrientation);
  if (!orientation) throw Error(Errc::MissingTag, "missing tag " + tags::PatientOrientation.str());
  for (std::size_t i = 0; i < 2; ++i) {
    d.patient_orientation[i] = i < orientation->size() ? (*orientation)[i] : std::string{};
  }
  d.study_instance_uid = required_text(ds, tags::StudyInstanceUID);
  d.series_instance_uid = required_text(ds, tags::SeriesInstanceUID);
  d.modality = required_text(ds, tags::Modality);
  d.body_part_examined = ds.text_or_empty(tags::BodyPartExamined);

  if (d.study_instance_uid != d.dnn_uid || d.series_instance_uid != d.dnn_uid) {
    throw Error(Errc::UIDMismatch, "StudyInstanceUID/SeriesInstanceUID differ from DnnUID " + d.dnn_uid);
  }
  return d;
}

}  // namespace iodeep::iod
