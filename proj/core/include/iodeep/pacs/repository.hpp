#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iodeep/dicom/dataset.hpp"

namespace iodeep::pacs {

enum class Level : std::uint8_t { Study, Series, Instance };

std::string_view level_name(Level level);
std::optional<Level> level_from_name(std::string_view name);

using TagMap = std::map<std::string, std::string, std::less<>>;

/// Keywords accepted as query filters.
std::span<const std::string_view> indexed_keywords();

/// Maps a filter key (keyword or 8 hex digits) to its keyword. Throws
/// Error(UnindexedTagFilter) for anything outside indexed_keywords().
std::string canonical_filter_key(std::string_view key);

/// One row of a query result. `attributes` carries the level's UID under
/// its own keyword plus descriptive tags and child counts.
struct Summary {
  Level level = Level::Instance;
  std::string uid;
  TagMap attributes;

  friend bool operator==(const Summary&, const Summary&) = default;
};

/// Store / query / retrieve surface shared by the local store and the HTTP
/// client, so the prediction workflow runs against either.
class Repository {
 public:
  virtual ~Repository() = default;

  /// Part-10 bytes in, SOPInstanceUID out. Throws Error(NotDicom),
  /// Error(IoFailure).
  virtual std::string store_instance(std::span<const std::uint8_t> file_bytes) = 0;
  /// Exact-match filtering, UID-ascending. Throws Error(UnindexedTagFilter).
  virtual std::vector<Summary> query(Level level, const TagMap& filters) const = 0;
  /// Throws Error(NotFound).
  virtual std::vector<std::uint8_t> retrieve_instance(std::string_view sop_instance_uid) const = 0;
  /// Throws Error(NotFound).
  virtual std::vector<std::uint8_t> retrieve_weights(std::string_view dnn_uid) const = 0;
  /// Validates the payload before keeping it.
  virtual void store_weights(std::string_view dnn_uid, std::span<const std::uint8_t> payload) = 0;
};

/// Locator written into DnnWeights for payloads kept by the store.
std::string weights_locator(std::string_view dnn_uid);
/// DnnUID named by a store locator, nullopt for any other locator.
std::optional<std::string> weights_locator_uid(std::string_view locator);

}  // namespace iodeep::pacs
