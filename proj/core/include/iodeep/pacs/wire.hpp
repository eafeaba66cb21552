#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "iodeep/dicom/dataset.hpp"
#include "iodeep/error.hpp"
#include "iodeep/pacs/repository.hpp"
#include "iodeep/workflow.hpp"

/// JSON bodies exchanged over the /v1 API.
namespace iodeep::pacs::wire {

/// Array of attribute objects, one per summary.
std::string summaries_to_json(const std::vector<Summary>& summaries);
std::vector<Summary> summaries_from_json(std::string_view body, Level level);

std::string prediction_to_json(const workflow::PredictionResult& result);
/// Throws Error(InvalidRequest) on malformed bodies.
workflow::PredictionResult prediction_from_json(std::string_view body);

struct ValidationRequest {
  std::string session;
  std::vector<rt::Decision> decisions;
  std::string reviewer;
};

std::string validation_to_json(const ValidationRequest& request);
/// Decisions are "accepted" / "rejected" (or true / false). Throws
/// Error(InvalidRequest).
ValidationRequest validation_from_json(std::string_view body);

/// {"error": <Errc name>, "message": ..., "stage": ...}
std::string error_to_json(const Error& error);
/// Rebuilds the error a server reported; unknown bodies become
/// Error(InvalidRequest) carrying the HTTP status.
Error error_from_json(std::string_view body, int http_status);
/// HTTP status the service uses for an error code.
int http_status(Errc code);

/// DICOM JSON model: keys are 8 hex digits, values {"vr", "Value"}.
/// Binary values are left out.
std::string dataset_to_json(const dicom::DataSet& ds);

std::string uid_to_json(std::string_view key, std::string_view uid);

}  // namespace iodeep::pacs::wire
