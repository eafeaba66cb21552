#include "iodeep/dicom/tags.hpp"

#include <array>

namespace iodeep::dicom::tags {

namespace {

struct Entry {
  Tag tag;
  std::string_view keyword;
  VR vr;
};

constexpr std::array<Entry, 77> kDictionary{{
    {FileMetaInformationGroupLength, "FileMetaInformationGroupLength", VR::UL},
    {FileMetaInformationVersion, "FileMetaInformationVersion", VR::OB},
    {MediaStorageSOPClassUID, "MediaStorageSOPClassUID", VR::UI},
    {MediaStorageSOPInstanceUID, "MediaStorageSOPInstanceUID", VR::UI},
    {TransferSyntaxUID, "TransferSyntaxUID", VR::UI},
    {ImplementationClassUID, "ImplementationClassUID", VR::UI},
    {ImplementationVersionName, "ImplementationVersionName", VR::SH},
    {SpecificCharacterSet, "SpecificCharacterSet", VR::CS},
    {SOPClassUID, "SOPClassUID", VR::UI},
    {SOPInstanceUID, "SOPInstanceUID", VR::UI},
    {StudyDate, "StudyDate", VR::DA},
    {SeriesDate, "SeriesDate", VR::DA},
    {StudyTime, "StudyTime", VR::TM},
    {AccessionNumber, "AccessionNumber", VR::SH},
    {Modality, "Modality", VR::CS},
    {Manufacturer, "Manufacturer", VR::LO},
    {InstitutionName, "InstitutionName", VR::LO},
    {ReferringPhysicianName, "ReferringPhysicianName", VR::PN},
    {StudyDescription, "StudyDescription", VR::LO},
    {SeriesDescription, "SeriesDescription", VR::LO},
    {OperatorsName, "OperatorsName", VR::PN},
    {ReferencedSOPClassUID, "ReferencedSOPClassUID", VR::UI},
    {ReferencedSOPInstanceUID, "ReferencedSOPInstanceUID", VR::UI},
    {PatientName, "PatientName", VR::PN},
    {PatientID, "PatientID", VR::LO},
    {PatientBirthDate, "PatientBirthDate", VR::DA},
    {PatientSex, "PatientSex", VR::CS},
    {BodyPartExamined, "BodyPartExamined", VR::CS},
    {StudyInstanceUID, "StudyInstanceUID", VR::UI},
    {SeriesInstanceUID, "SeriesInstanceUID", VR::UI},
    {StudyID, "StudyID", VR::SH},
    {SeriesNumber, "SeriesNumber", VR::IS},
    {InstanceNumber, "InstanceNumber", VR::IS},
    {PatientOrientation, "PatientOrientation", VR::CS},
    {FrameOfReferenceUID, "FrameOfReferenceUID", VR::UI},
    {PositionReferenceIndicator, "PositionReferenceIndicator", VR::LO},
    {SamplesPerPixel, "SamplesPerPixel", VR::US},
    {PhotometricInterpretation, "PhotometricInterpretation", VR::CS},
    {PlanarConfiguration, "PlanarConfiguration", VR::US},
    {Rows, "Rows", VR::US},
    {Columns, "Columns", VR::US},
    {BitsAllocated, "BitsAllocated", VR::US},
    {BitsStored, "BitsStored", VR::US},
    {HighBit, "HighBit", VR::US},
    {PixelRepresentation, "PixelRepresentation", VR::US},
    {WindowCenter, "WindowCenter", VR::DS},
    {WindowWidth, "WindowWidth", VR::DS},
    {PixelData, "PixelData", VR::OW},
    {StructureSetLabel, "StructureSetLabel", VR::SH},
    {StructureSetName, "StructureSetName", VR::LO},
    {StructureSetDate, "StructureSetDate", VR::DA},
    {StructureSetTime, "StructureSetTime", VR::TM},
    {ReferencedFrameOfReferenceSequence, "ReferencedFrameOfReferenceSequence", VR::SQ},
    {RTReferencedStudySequence, "RTReferencedStudySequence", VR::SQ},
    {RTReferencedSeriesSequence, "RTReferencedSeriesSequence", VR::SQ},
    {ContourImageSequence, "ContourImageSequence", VR::SQ},
    {StructureSetROISequence, "StructureSetROISequence", VR::SQ},
    {ROINumber, "ROINumber", VR::IS},
    {ReferencedFrameOfReferenceUID, "ReferencedFrameOfReferenceUID", VR::UI},
    {ROIName, "ROIName", VR::LO},
    {ROIDisplayColor, "ROIDisplayColor", VR::IS},
    {ROIGenerationAlgorithm, "ROIGenerationAlgorithm", VR::CS},
    {ROIContourSequence, "ROIContourSequence", VR::SQ},
    {ContourSequence, "ContourSequence", VR::SQ},
    {ContourGeometricType, "ContourGeometricType", VR::CS},
    {NumberOfContourPoints, "NumberOfContourPoints", VR::IS},
    {ContourNumber, "ContourNumber", VR::IS},
    {ContourData, "ContourData", VR::DS},
    {RTROIObservationsSequence, "RTROIObservationsSequence", VR::SQ},
    {ObservationNumber, "ObservationNumber", VR::IS},
    {ReferencedROINumber, "ReferencedROINumber", VR::IS},
    {RTROIInterpretedType, "RTROIInterpretedType", VR::CS},
    {ROIInterpreter, "ROIInterpreter", VR::PN},
    {ApprovalStatus, "ApprovalStatus", VR::CS},
    {ReviewDate, "ReviewDate", VR::DA},
    {ReviewTime, "ReviewTime", VR::TM},
    {ReviewerName, "ReviewerName", VR::PN},
}};

}  // namespace

std::string_view keyword(Tag tag) noexcept {
  for (const auto& e : kDictionary) {
    if (e.tag == tag) return e.keyword;
  }
  return {};
}

std::optional<Tag> tag_for_keyword(std::string_view kw) noexcept {
  for (const auto& e : kDictionary) {
    if (e.keyword == kw) return e.tag;
  }
  return std::nullopt;
}

std::optional<VR> dictionary_vr(Tag tag) noexcept {
  for (const auto& e : kDictionary) {
    if (e.tag == tag) return e.vr;
  }
  return std::nullopt;
}

}  // namespace iodeep::dicom::tags
