#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iodeep/pacs/repository.hpp"
#include "iodeep/rt/contour.hpp"
#include "iodeep/rt/rtstruct.hpp"

namespace iodeep::workflow {

enum class ProposalStatus : std::uint8_t { Proposed, Accepted, Rejected };

std::string_view status_name(ProposalStatus status);

struct RoiProposal {
  std::string id;
  std::string slice_ref_uid;
  rt::RoiPolyline polyline;
  /// Mean mask probability inside the contour; informational only.
  double confidence = 0;
  ProposalStatus status = ProposalStatus::Proposed;

  friend bool operator==(const RoiProposal&, const RoiProposal&) = default;
};

/// Pipeline stages in execution order, as reported by Error::stage().
namespace stage {
inline constexpr std::string_view kSlice = "slice";
inline constexpr std::string_view kTags = "tags";
inline constexpr std::string_view kQuery = "query";
inline constexpr std::string_view kSelection = "selection";
inline constexpr std::string_view kRetrieve = "retrieve";
inline constexpr std::string_view kWeights = "weights";
inline constexpr std::string_view kParse = "parse";
inline constexpr std::string_view kShapeCheck = "shape_check";
inline constexpr std::string_view kCreateModel = "create_model";
inline constexpr std::string_view kPreprocess = "preprocess";
inline constexpr std::string_view kPredict = "predict";
inline constexpr std::string_view kPolylines = "polylines";
inline constexpr std::string_view kBuild = "build_rtstruct";
inline constexpr std::string_view kStore = "store";
}  // namespace stage

struct PredictionResult {
  std::string session_id;
  std::string slice_uid;
  std::string frame_of_reference_uid;
  std::string dnn_uid;
  std::string dnn_name;
  std::vector<RoiProposal> proposals;
};

struct WorkflowOptions {
  rt::ContourOptions contour;
  /// Sessions kept in memory; the oldest is dropped beyond this.
  std::size_t max_sessions = 1024;
  /// Called on entry to every stage; an exception thrown here is reported
  /// as that stage's failure. Used to exercise failure paths.
  std::function<void(std::string_view stage)> stage_hook;
};

/// Runs the ROI prediction scenario against a repository and holds the
/// proposal sets until they are validated.
///
/// Thread-safe: sessions are independent and each validation is atomic.
class WorkflowService {
 public:
  explicit WorkflowService(pacs::Repository& repository, WorkflowOptions options = {});

  /// slice -> tags -> IODeep query -> selection -> retrieve IODeep and
  /// weights -> parse -> shape check -> model -> preprocess -> predict ->
  /// polylines. Every failure is an Error whose stage() names the step;
  /// no candidate yields Error(NoMatchingNetwork) at the selection stage.
  PredictionResult run_roi_prediction(std::string_view slice_uid);

  /// One decision per proposal, in proposal order. Stores the RT Structure
  /// Set of the accepted proposals and returns its SOPInstanceUID. Throws
  /// Error(NotFound) for unknown sessions, Error(InvalidState) when the
  /// session was already validated, Error(InvalidRequest) on a decision
  /// count mismatch, Error(EmptyRoiSet) when nothing is accepted and
  /// Error(StoreFailure) when the repository rejects the upload.
  std::string submit_validation(std::string_view session_id, const std::vector<rt::Decision>& decisions,
                                std::string_view reviewer_name);

  /// Snapshot of a session's proposals.
  std::optional<PredictionResult> session(std::string_view session_id) const;

 private:
  struct Session {
    PredictionResult result;
    bool validated = false;
    std::string rtstruct_uid;
  };

  pacs::Repository& repo_;
  WorkflowOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, Session, std::less<>> sessions_;
  std::vector<std::string> session_order_;
};

}  // namespace iodeep::workflow
