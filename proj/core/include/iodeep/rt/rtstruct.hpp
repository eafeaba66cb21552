#pragma once

#include <string>
#include <vector>

#include "iodeep/dicom/dataset.hpp"
#include "iodeep/rt/contour.hpp"

namespace iodeep::rt {

enum class Decision : std::uint8_t { Accepted, Rejected };

/// Physician review of a set of proposals.
struct ValidationRecord {
  std::vector<Decision> decisions;
  std::string reviewer_name;
  /// DICOM DA (YYYYMMDD) and TM (HHMMSS).
  std::string review_date;
  std::string review_time;
  std::string approval_status = "APPROVED";
};

/// Current local date/time in DA / TM form.
std::pair<std::string, std::string> now_da_tm();

/// Decimal string for a contour coordinate (DS, at most 16 characters).
std::string format_ds(double value);

/// RT Structure Set over accepted ROIs of one slice.
///
/// Patient attributes (group 0010) and study identity are copied from the
/// source slice; the ROIs become CLOSED_PLANAR contours with z = 0 in the
/// ROI Contour module, the Approval module is filled from `review`, and a
/// fresh SOPInstanceUID is generated unless `sop_instance_uid` is given.
/// Throws Error(EmptyRoiSet), Error(FrameMismatch), Error(MissingTag).
dicom::DataSet build_rtstruct(const std::vector<RoiPolyline>& accepted, const dicom::DataSet& source,
                              const ValidationRecord& review, std::string sop_instance_uid = {});

/// Contours of a structure set, ordered by ROI number; slice_ref_uid is the
/// referenced frame of reference and label the ROI name.
std::vector<RoiPolyline> extract_polylines(const dicom::DataSet& rtstruct);

}  // namespace iodeep::rt
