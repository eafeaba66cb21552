#include "iodeep/rt/rtstruct.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>

#include "iodeep/dicom/tags.hpp"
#include "iodeep/dicom/uid.hpp"
#include "iodeep/error.hpp"

namespace iodeep::rt {

using dicom::DataSet;
using dicom::VR;
namespace tags = dicom::tags;

namespace {

constexpr dicom::Tag kStudyCopy[] = {tags::StudyDate,       tags::StudyTime,
                                     tags::AccessionNumber, tags::ReferringPhysicianName,
                                     tags::StudyDescription, tags::StudyInstanceUID,
                                     tags::StudyID};

DataSet contour_image_ref(const DataSet& source) {
  DataSet ref;
  ref.set_text(tags::ReferencedSOPClassUID, VR::UI, source.text_or_empty(tags::SOPClassUID));
  ref.set_text(tags::ReferencedSOPInstanceUID, VR::UI, source.text_or_empty(tags::SOPInstanceUID));
  return ref;
}

}  // namespace

std::pair<std::string, std::string> now_da_tm() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  char da[16];
  char tm_buf[16];
  std::strftime(da, sizeof da, "%Y%m%d", &tm);
  std::strftime(tm_buf, sizeof tm_buf, "%H%M%S", &tm);
  return {da, tm_buf};
}

std::string format_ds(double value) {
  if (value == 0) return "0";
  char buf[32];
  for (int precision = 12; precision >= 1; --precision) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, precision);
    if (ec == std::errc{} && ptr - buf <= 16) return std::string(buf, ptr);
  }
  return std::to_string(static_cast<long long>(std::llround(value)));
}

DataSet build_rtstruct(const std::vector<RoiPolyline>& accepted, const DataSet& source,
                       const ValidationRecord& review, std::string sop_instance_uid) {
  if (accepted.empty()) throw Error(Errc::EmptyRoiSet, "no accepted ROI to store");
  const auto frame = source.text(tags::FrameOfReferenceUID);
  if (!frame || frame->empty()) {
    throw Error(Errc::MissingTag, "source slice lacks FrameOfReferenceUID " + tags::FrameOfReferenceUID.str());
  }
  for (const auto& roi : accepted) {
    if (roi.slice_ref_uid != *frame) {
      throw Error(Errc::FrameMismatch, "ROI '" + roi.label + "' references frame " + roi.slice_ref_uid +
                                           ", slice frame is " + *frame);
    }
    if (roi.points.size() < 3) throw Error(Errc::InvalidRequest, "ROI '" + roi.label + "' has fewer than 3 points");
  }
  const auto study_uid = source.text(tags::StudyInstanceUID);
  if (!study_uid) throw Error(Errc::MissingTag, "source slice lacks StudyInstanceUID");

  DataSet ds;
  const auto [date, time] = now_da_tm();
  ds.set_text(tags::SOPClassUID, VR::UI, std::string(dicom::kRTStructureSetStorage));
  ds.set_text(tags::SOPInstanceUID, VR::UI,
              sop_instance_uid.empty() ? dicom::generate_uid() : std::move(sop_instance_uid));
  ds.set_text(tags::Modality, VR::CS, "RTSTRUCT");
  ds.set_text(tags::SeriesDescription, VR::LO, "IODeep validated ROIs");
  ds.set_empty(tags::OperatorsName, VR::PN);
  ds.set_text(tags::Manufacturer, VR::LO, "IODeep");

  // Patient module: everything the slice carries in group 0010.
  for (const auto* e : source.group(0x0010)) ds.set(*e);
  for (const auto tag : {tags::PatientName, tags::PatientID, tags::PatientBirthDate, tags::PatientSex}) {
    if (!ds.contains(tag)) ds.set_empty(tag, *tags::dictionary_vr(tag));
  }
  for (const auto tag : kStudyCopy) {
    if (const auto* e = source.find(tag)) {
      ds.set(*e);
    } else {
      ds.set_empty(tag, *tags::dictionary_vr(tag));
    }
  }
  ds.set_text(tags::SeriesInstanceUID, VR::UI, dicom::generate_uid());
  ds.set_text(tags::SeriesNumber, VR::IS, "1");
  ds.set_text(tags::InstanceNumber, VR::IS, "1");
  ds.set_text(tags::FrameOfReferenceUID, VR::UI, *frame);
  ds.set_empty(tags::PositionReferenceIndicator, VR::LO);

  // Structure Set module.
  ds.set_text(tags::StructureSetLabel, VR::SH, "IODEEP_ROIS");
  ds.set_text(tags::StructureSetDate, VR::DA, date);
  ds.set_text(tags::StructureSetTime, VR::TM, time);
  {
    DataSet series_ref;
    series_ref.set_text(tags::SeriesInstanceUID, VR::UI, source.text_or_empty(tags::SeriesInstanceUID));
    series_ref.set_items(tags::ContourImageSequence, {contour_image_ref(source)});
    DataSet study_ref;
    study_ref.set_text(tags::ReferencedSOPClassUID, VR::UI, "1.2.840.10008.3.1.2.3.1");
    study_ref.set_text(tags::ReferencedSOPInstanceUID, VR::UI, *study_uid);
    study_ref.set_items(tags::RTReferencedSeriesSequence, {std::move(series_ref)});
    DataSet frame_ref;
    frame_ref.set_text(tags::FrameOfReferenceUID, VR::UI, *frame);
    frame_ref.set_items(tags::RTReferencedStudySequence, {std::move(study_ref)});
    ds.set_items(tags::ReferencedFrameOfReferenceSequence, {std::move(frame_ref)});
  }

  dicom::Items roi_items;
  dicom::Items contour_items;
  dicom::Items observation_items;
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    const auto& roi = accepted[i];
    const auto number = std::to_string(i + 1);

    DataSet ss_roi;
    ss_roi.set_text(tags::ROINumber, VR::IS, number);
    ss_roi.set_text(tags::ReferencedFrameOfReferenceUID, VR::UI, *frame);
    ss_roi.set_text(tags::ROIName, VR::LO, roi.label);
    ss_roi.set_text(tags::ROIGenerationAlgorithm, VR::CS, "SEMIAUTOMATIC");
    roi_items.push_back(std::move(ss_roi));

    dicom::Strings coords;
    coords.reserve(roi.points.size() * 3);
    for (const auto& p : roi.points) {
      coords.push_back(format_ds(p.x));
      coords.push_back(format_ds(p.y));
      coords.push_back("0");
    }
    DataSet contour;
    contour.set_items(tags::ContourImageSequence, {contour_image_ref(source)});
    contour.set_text(tags::ContourGeometricType, VR::CS, "CLOSED_PLANAR");
    contour.set_text(tags::NumberOfContourPoints, VR::IS, std::to_string(roi.points.size()));
    contour.set_text(tags::ContourNumber, VR::IS, "1");
    contour.set_texts(tags::ContourData, VR::DS, std::move(coords));
    DataSet roi_contour;
    roi_contour.set_texts(tags::ROIDisplayColor, VR::IS, {"0", "255", "0"});
    roi_contour.set_items(tags::ContourSequence, {std::move(contour)});
    roi_contour.set_text(tags::ReferencedROINumber, VR::IS, number);
    contour_items.push_back(std::move(roi_contour));

    DataSet observation;
    observation.set_text(tags::ObservationNumber, VR::IS, number);
    observation.set_text(tags::ReferencedROINumber, VR::IS, number);
    observation.set_empty(tags::RTROIInterpretedType, VR::CS);
    observation.set_text(tags::ROIInterpreter, VR::PN, review.reviewer_name);
    observation_items.push_back(std::move(observation));
  }
  ds.set_items(tags::StructureSetROISequence, std::move(roi_items));
  ds.set_items(tags::ROIContourSequence, std::move(contour_items));
  ds.set_items(tags::RTROIObservationsSequence, std::move(observation_items));

  // Approval module.
  ds.set_text(tags::ApprovalStatus, VR::CS, review.approval_status);
  ds.set_text(tags::ReviewDate, VR::DA, review.review_date.empty() ? date : review.review_date);
  ds.set_text(tags::ReviewTime, VR::TM, review.review_time.empty() ? time : review.review_time);
  ds.set_text(tags::ReviewerName, VR::PN, review.reviewer_name);
  return ds;
}

std::vector<RoiPolyline> extract_polylines(const DataSet& rtstruct) {
  std::map<std::uint32_t, std::pair<std::string, std::string>> names;  // number -> (name, frame)
  if (const auto* rois = rtstruct.items(tags::StructureSetROISequence)) {
    for (const auto& item : *rois) {
      const auto number = item.uint(tags::ROINumber);
      if (!number) continue;
      names[*number] = {item.text_or_empty(tags::ROIName),
                        item.text_or_empty(tags::ReferencedFrameOfReferenceUID)};
    }
  }
  std::map<std::uint32_t, RoiPolyline> by_number;
  const auto* contours = rtstruct.items(tags::ROIContourSequence);
  if (!contours) throw Error(Errc::MissingTag, "missing tag " + tags::ROIContourSequence.str());
  for (const auto& roi_contour : *contours) {
    const auto number = roi_contour.uint(tags::ReferencedROINumber);
    if (!number) throw Error(Errc::MissingTag, "ROI contour without ReferencedROINumber");
    RoiPolyline p;
    if (auto it = names.find(*number); it != names.end()) {
      p.label = it->second.first;
      p.slice_ref_uid = it->second.second;
    }
    if (p.slice_ref_uid.empty()) p.slice_ref_uid = rtstruct.text_or_empty(tags::FrameOfReferenceUID);
    if (const auto* seq = roi_contour.items(tags::ContourSequence)) {
      for (const auto& contour : *seq) {
        const auto data = contour.decimals(tags::ContourData);
        if (!data || data->size() % 3 != 0) {
          throw Error(Errc::MissingTag, "contour without x\\y\\z ContourData");
        }
        for (std::size_t i = 0; i < data->size(); i += 3) p.points.push_back({(*data)[i], (*data)[i + 1]});
      }
    }
    by_number.emplace(*number, std::move(p));
  }
  std::vector<RoiPolyline> out;
  for (auto& [_, p] : by_number) out.push_back(std::move(p));
  return out;
}

}  // namespace iodeep::rt
