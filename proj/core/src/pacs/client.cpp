#include "iodeep/pacs/client.hpp"

#include <httplib.h>

#include "iodeep/error.hpp"

namespace iodeep::pacs {

namespace {

constexpr const char* kJson = "application/json";

httplib::Client connect(const std::string& base) {
  httplib::Client client(base);
  client.set_connection_timeout(5);
  client.set_read_timeout(300);
  client.set_write_timeout(300);
  return client;
}

std::string checked(const httplib::Result& result, const std::string& base, const std::string& what) {
  if (!result) {
    throw Error(Errc::ConnectionFailure, "cannot reach the PACS service at " + base + " (" +
                                             httplib::to_string(result.error()) + ") while trying to " + what +
                                             "; is `iodeep serve` running there?");
  }
  if (result->status < 200 || result->status >= 300) throw wire::error_from_json(result->body, result->status);
  return result->body;
}

std::vector<std::uint8_t> to_bytes(const std::string& s) { return {s.begin(), s.end()}; }

std::string path_for(Level level, const TagMap& filters, TagMap& rest) {
  rest = filters;
  if (level == Level::Series) {
    if (auto it = rest.find("StudyInstanceUID"); it != rest.end()) {
      auto path = "/v1/studies/" + it->second + "/series";
      rest.erase(it);
      return path;
    }
    return "/v1/series";
  }
  if (level == Level::Study) return "/v1/studies";
  return "/v1/instances";
}

}  // namespace

PacsClient::PacsClient(std::string base_url) : base_url_(std::move(base_url)) {
  if (base_url_.find("://") == std::string::npos) base_url_ = "http://" + base_url_;
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::string PacsClient::store_instance(std::span<const std::uint8_t> file_bytes) {
  auto client = connect(base_url_);
  const auto body = checked(client.Post("/v1/instances", reinterpret_cast<const char*>(file_bytes.data()),
                                        file_bytes.size(), "application/dicom"),
                            base_url_, "store an instance");
  return wire::summaries_from_json("[" + body + "]", Level::Instance).front().uid;
}

std::vector<Summary> PacsClient::query(Level level, const TagMap& filters) const {
  auto client = connect(base_url_);
  TagMap rest;
  const auto path = path_for(level, filters, rest);
  httplib::Params params(rest.begin(), rest.end());
  const auto body = checked(client.Get(path, params, httplib::Headers{}), base_url_, "query " + path);
  return wire::summaries_from_json(body, level);
}

std::vector<std::uint8_t> PacsClient::retrieve_instance(std::string_view uid) const {
  auto client = connect(base_url_);
  return to_bytes(checked(client.Get("/v1/instances/" + std::string(uid)), base_url_, "retrieve an instance"));
}

std::vector<std::uint8_t> PacsClient::retrieve_weights(std::string_view dnn_uid) const {
  auto client = connect(base_url_);
  return to_bytes(checked(client.Get("/v1/weights/" + std::string(dnn_uid)), base_url_, "retrieve weights"));
}

void PacsClient::store_weights(std::string_view dnn_uid, std::span<const std::uint8_t> payload) {
  auto client = connect(base_url_);
  checked(client.Post("/v1/weights/" + std::string(dnn_uid), reinterpret_cast<const char*>(payload.data()),
                      payload.size(), "application/octet-stream"),
          base_url_, "store weights");
}

workflow::PredictionResult PacsClient::predict(std::string_view slice_uid) const {
  auto client = connect(base_url_);
  return wire::prediction_from_json(
      checked(client.Post("/v1/predict/" + std::string(slice_uid)), base_url_, "run a prediction"));
}

std::string PacsClient::submit(const wire::ValidationRequest& request) const {
  auto client = connect(base_url_);
  const auto body =
      checked(client.Post("/v1/rtstruct", wire::validation_to_json(request), kJson), base_url_, "submit a validation");
  return wire::summaries_from_json("[" + body + "]", Level::Instance).front().uid;
}

std::string PacsClient::metadata_json(std::string_view uid) const {
  auto client = connect(base_url_);
  return checked(client.Get("/v1/instances/" + std::string(uid) + "/metadata"), base_url_, "read metadata");
}

bool PacsClient::healthy() const {
  auto client = connect(base_url_);
  auto result = client.Get("/v1/health");
  return result && result->status == 200;
}

}  // namespace iodeep::pacs
