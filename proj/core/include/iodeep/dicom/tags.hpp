#pragma once

#include <optional>
#include <string_view>

#include "iodeep/dicom/tag.hpp"
#include "iodeep/dicom/vr.hpp"

// Attribute dictionary subset used by the image, IODeep and RT Structure Set
// objects this project reads and writes.
namespace iodeep::dicom::tags {

// File meta
inline constexpr Tag FileMetaInformationGroupLength{0x0002, 0x0000};
inline constexpr Tag FileMetaInformationVersion{0x0002, 0x0001};
inline constexpr Tag MediaStorageSOPClassUID{0x0002, 0x0002};
inline constexpr Tag MediaStorageSOPInstanceUID{0x0002, 0x0003};
inline constexpr Tag TransferSyntaxUID{0x0002, 0x0010};
inline constexpr Tag ImplementationClassUID{0x0002, 0x0012};
inline constexpr Tag ImplementationVersionName{0x0002, 0x0013};

// SOP common, study, series
inline constexpr Tag SpecificCharacterSet{0x0008, 0x0005};
inline constexpr Tag SOPClassUID{0x0008, 0x0016};
inline constexpr Tag SOPInstanceUID{0x0008, 0x0018};
inline constexpr Tag StudyDate{0x0008, 0x0020};
inline constexpr Tag SeriesDate{0x0008, 0x0021};
inline constexpr Tag StudyTime{0x0008, 0x0030};
inline constexpr Tag AccessionNumber{0x0008, 0x0050};
inline constexpr Tag Modality{0x0008, 0x0060};
inline constexpr Tag Manufacturer{0x0008, 0x0070};
inline constexpr Tag InstitutionName{0x0008, 0x0080};
inline constexpr Tag ReferringPhysicianName{0x0008, 0x0090};
inline constexpr Tag StudyDescription{0x0008, 0x1030};
inline constexpr Tag SeriesDescription{0x0008, 0x103E};
inline constexpr Tag OperatorsName{0x0008, 0x1070};
inline constexpr Tag ReferencedSOPClassUID{0x0008, 0x1150};
inline constexpr Tag ReferencedSOPInstanceUID{0x0008, 0x1155};

// Patient
inline constexpr Tag PatientName{0x0010, 0x0010};
inline constexpr Tag PatientID{0x0010, 0x0020};
inline constexpr Tag PatientBirthDate{0x0010, 0x0030};
inline constexpr Tag PatientSex{0x0010, 0x0040};

inline constexpr Tag BodyPartExamined{0x0018, 0x0015};

inline constexpr Tag StudyInstanceUID{0x0020, 0x000D};
inline constexpr Tag SeriesInstanceUID{0x0020, 0x000E};
inline constexpr Tag StudyID{0x0020, 0x0010};
inline constexpr Tag SeriesNumber{0x0020, 0x0011};
inline constexpr Tag InstanceNumber{0x0020, 0x0013};
inline constexpr Tag PatientOrientation{0x0020, 0x0020};
inline constexpr Tag FrameOfReferenceUID{0x0020, 0x0052};
inline constexpr Tag PositionReferenceIndicator{0x0020, 0x1040};

// Image pixel
inline constexpr Tag SamplesPerPixel{0x0028, 0x0002};
inline constexpr Tag PhotometricInterpretation{0x0028, 0x0004};
inline constexpr Tag PlanarConfiguration{0x0028, 0x0006};
inline constexpr Tag Rows{0x0028, 0x0010};
inline constexpr Tag Columns{0x0028, 0x0011};
inline constexpr Tag BitsAllocated{0x0028, 0x0100};
inline constexpr Tag BitsStored{0x0028, 0x0101};
inline constexpr Tag HighBit{0x0028, 0x0102};
inline constexpr Tag PixelRepresentation{0x0028, 0x0103};
inline constexpr Tag WindowCenter{0x0028, 0x1050};
inline constexpr Tag WindowWidth{0x0028, 0x1051};
inline constexpr Tag PixelData{0x7FE0, 0x0010};

// Structure set, ROI contour, RT ROI observations
inline constexpr Tag StructureSetLabel{0x3006, 0x0002};
inline constexpr Tag StructureSetName{0x3006, 0x0004};
inline constexpr Tag StructureSetDate{0x3006, 0x0008};
inline constexpr Tag StructureSetTime{0x3006, 0x0009};
inline constexpr Tag ReferencedFrameOfReferenceSequence{0x3006, 0x0010};
inline constexpr Tag RTReferencedStudySequence{0x3006, 0x0012};
inline constexpr Tag RTReferencedSeriesSequence{0x3006, 0x0014};
inline constexpr Tag ContourImageSequence{0x3006, 0x0016};
inline constexpr Tag StructureSetROISequence{0x3006, 0x0020};
inline constexpr Tag ROINumber{0x3006, 0x0022};
inline constexpr Tag ReferencedFrameOfReferenceUID{0x3006, 0x0024};
inline constexpr Tag ROIName{0x3006, 0x0026};
inline constexpr Tag ROIDisplayColor{0x3006, 0x002A};
inline constexpr Tag ROIGenerationAlgorithm{0x3006, 0x0036};
inline constexpr Tag ROIContourSequence{0x3006, 0x0039};
inline constexpr Tag ContourSequence{0x3006, 0x0040};
inline constexpr Tag ContourGeometricType{0x3006, 0x0042};
inline constexpr Tag NumberOfContourPoints{0x3006, 0x0046};
inline constexpr Tag ContourNumber{0x3006, 0x0048};
inline constexpr Tag ContourData{0x3006, 0x0050};
inline constexpr Tag RTROIObservationsSequence{0x3006, 0x0080};
inline constexpr Tag ObservationNumber{0x3006, 0x0082};
inline constexpr Tag ReferencedROINumber{0x3006, 0x0084};
inline constexpr Tag RTROIInterpretedType{0x3006, 0x00A4};
inline constexpr Tag ROIInterpreter{0x3006, 0x00A6};

// Approval
inline constexpr Tag ApprovalStatus{0x300E, 0x0002};
inline constexpr Tag ReviewDate{0x300E, 0x0004};
inline constexpr Tag ReviewTime{0x300E, 0x0005};
inline constexpr Tag ReviewerName{0x300E, 0x0008};

/// Keyword for a dictionary tag ("Modality"), empty for unknown tags.
std::string_view keyword(Tag tag) noexcept;
std::optional<Tag> tag_for_keyword(std::string_view keyword) noexcept;
/// Dictionary VR, used when building elements by keyword.
std::optional<VR> dictionary_vr(Tag tag) noexcept;

}  // namespace iodeep::dicom::tags
