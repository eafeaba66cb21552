#pragma once

#include <string>

#include "iodeep/pacs/repository.hpp"
#include "iodeep/pacs/wire.hpp"
#include "iodeep/workflow.hpp"

namespace iodeep::pacs {

/// Repository over the /v1 HTTP API. Each call opens its own connection,
/// so one client may be shared between threads. Server-side failures are
/// rethrown with their original code and stage; an unreachable server
/// raises Error(ConnectionFailure).
class PacsClient final : public Repository {
 public:
  /// "http://host:port" or "host:port".
  explicit PacsClient(std::string base_url);

  std::string store_instance(std::span<const std::uint8_t> file_bytes) override;
  std::vector<Summary> query(Level level, const TagMap& filters) const override;
  std::vector<std::uint8_t> retrieve_instance(std::string_view sop_instance_uid) const override;
  std::vector<std::uint8_t> retrieve_weights(std::string_view dnn_uid) const override;
  void store_weights(std::string_view dnn_uid, std::span<const std::uint8_t> payload) override;

  workflow::PredictionResult predict(std::string_view slice_uid) const;
  std::string submit(const wire::ValidationRequest& request) const;
  std::string metadata_json(std::string_view sop_instance_uid) const;
  bool healthy() const;

  const std::string& base_url() const { return base_url_; }

 private:
  std::string base_url_;
};

}  // namespace iodeep::pacs
