#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iodeep {

/// Every failure the library reports, grouped by the layer that raises it.
enum class Errc {
  // dicom codec / files
  UnsupportedVR,
  UnknownVR,
  OddGroupWithoutPrivateCreator,
  TruncatedStream,
  ValueTooLong,
  NotDicom,
  UnsupportedTransferSyntax,
  IoFailure,
  // iodeep instances and slices
  InvalidUID,
  InconsistentPixelSpec,
  NotIODeep,
  MissingTag,
  UIDMismatch,
  // architecture documents and shapes
  MalformedDocument,
  UnknownLayerKind,
  DanglingSkipConnection,
  CyclicGraph,
  ShapeUnderflow,
  ConcatSpatialMismatch,
  UnsupportedPhotometric,
  // inference back-end
  WeightsNotFound,
  ChecksumMismatch,
  FormatVersionUnsupported,
  MalformedWeights,
  MissingWeight,
  WeightShapeMismatch,
  ShapeMismatch,
  PixelLengthMismatch,
  // structure sets
  FrameMismatch,
  EmptyRoiSet,
  // store / service / workflow
  NotFound,
  UnindexedTagFilter,
  NoMatchingNetwork,
  StoreFailure,
  InvalidRequest,
  InvalidState,
  ConnectionFailure,
};

std::string_view errc_name(Errc code) noexcept;
/// Inverse of errc_name; nullopt for unknown names.
std::optional<Errc> errc_from_name(std::string_view name) noexcept;

/// Library exception. `stage()` is filled in by the prediction workflow to
/// tell which pipeline step failed; it is empty everywhere else.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Error(Errc code, const std::string& message, std::string stage)
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  Errc code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  Errc code_;
  std::string stage_;
};

}  // namespace iodeep
