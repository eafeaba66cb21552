#include "iodeep/error.hpp"

namespace iodeep {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::UnsupportedVR: return "UnsupportedVR";
    case Errc::UnknownVR: return "UnknownVR";
    case Errc::OddGroupWithoutPrivateCreator: return "OddGroupWithoutPrivateCreator";
    case Errc::TruncatedStream: return "TruncatedStream";
    case Errc::ValueTooLong: return "ValueTooLong";
    case Errc::NotDicom: return "NotDicom";
    case Errc::UnsupportedTransferSyntax: return "UnsupportedTransferSyntax";
    case Errc::IoFailure: return "IoFailure";
    case Errc::InvalidUID: return "InvalidUID";
    case Errc::InconsistentPixelSpec: return "InconsistentPixelSpec";
    case Errc::NotIODeep: return "NotIODeep";
    case Errc::MissingTag: return "MissingTag";
    case Errc::UIDMismatch: return "UIDMismatch";
    case Errc::MalformedDocument: return "MalformedDocument";
    case Errc::UnknownLayerKind: return "UnknownLayerKind";
    case Errc::DanglingSkipConnection: return "DanglingSkipConnection";
    case Errc::CyclicGraph: return "CyclicGraph";
    case Errc::ShapeUnderflow: return "ShapeUnderflow";
    case Errc::ConcatSpatialMismatch: return "ConcatSpatialMismatch";
    case Errc::UnsupportedPhotometric: return "UnsupportedPhotometric";
    case Errc::WeightsNotFound: return "WeightsNotFound";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::FormatVersionUnsupported: return "FormatVersionUnsupported";
    case Errc::MalformedWeights: return "MalformedWeights";
    case Errc::MissingWeight: return "MissingWeight";
    case Errc::WeightShapeMismatch: return "WeightShapeMismatch";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::PixelLengthMismatch: return "PixelLengthMismatch";
    case Errc::FrameMismatch: return "FrameMismatch";
    case Errc::EmptyRoiSet: return "EmptyRoiSet";
    case Errc::NotFound: return "NotFound";
    case Errc::UnindexedTagFilter: return "UnindexedTagFilter";
    case Errc::NoMatchingNetwork: return "NoMatchingNetwork";
    case Errc::StoreFailure: return "StoreFailure";
    case Errc::InvalidRequest: return "InvalidRequest";
    case Errc::InvalidState: return "InvalidState";
    case Errc::ConnectionFailure: return "ConnectionFailure";
  }
  return "Unknown";
}

std::optional<Errc> errc_from_name(std::string_view name) noexcept {
  for (int i = 0; i <= static_cast<int>(Errc::ConnectionFailure); ++i) {
    const auto code = static_cast<Errc>(i);
    if (errc_name(code) == name) return code;
  }
  return std::nullopt;
}

}  // namespace iodeep
