#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "iodeep/pacs/repository.hpp"

namespace iodeep::pacs {

struct InstanceRecord {
  std::string sop_instance_uid;
  std::string sop_class_uid;
  std::string study_uid;
  std::string series_uid;
  /// Path relative to the store root.
  std::string file;
  /// Filterable tags, keyed by keyword.
  TagMap indexed;
  /// Descriptive tags returned in summaries but not filterable.
  TagMap display;

  friend bool operator==(const InstanceRecord&, const InstanceRecord&) = default;
};

/// Index entry for a decoded body. Throws Error(MissingTag) without a
/// SOPInstanceUID, Error(InvalidUID) when it is malformed.
InstanceRecord record_of(const dicom::DataSet& body);

/// Directory-backed store.
///
///   <root>/instances/<SOPInstanceUID>.dcm   bytes as received
///   <root>/weights/<DnnUID>.iodw            weights payloads
///   <root>/index.jsonl                      journal of index updates
///
/// Files are written to a temporary name and renamed into place; the index
/// line is appended afterwards, so a crash leaves at worst an unindexed file
/// which rebuild_index() picks up. Readers share a lock, writers take it
/// exclusively.
class PacsStore final : public Repository {
 public:
  /// Creates the layout if needed and loads the journal, rebuilding from
  /// disk when it is missing or unreadable.
  explicit PacsStore(std::filesystem::path root);

  std::string store_instance(std::span<const std::uint8_t> file_bytes) override;
  std::vector<Summary> query(Level level, const TagMap& filters) const override;
  std::vector<std::uint8_t> retrieve_instance(std::string_view sop_instance_uid) const override;
  std::vector<std::uint8_t> retrieve_weights(std::string_view dnn_uid) const override;
  void store_weights(std::string_view dnn_uid, std::span<const std::uint8_t> payload) override;

  /// Decoded body of a stored instance. Throws Error(NotFound).
  dicom::DataSet dataset(std::string_view sop_instance_uid) const;
  std::optional<InstanceRecord> record(std::string_view sop_instance_uid) const;
  /// All records, UID-ascending.
  std::vector<InstanceRecord> records() const;
  /// Bumped by every successful store.
  std::uint64_t revision() const;

  /// Re-reads every instance file and rewrites the journal as a snapshot.
  void rebuild_index();

  const std::filesystem::path& root() const { return root_; }

 private:
  void load_journal();
  void write_snapshot();
  void append_journal(const InstanceRecord& record);
  std::filesystem::path instance_path(std::string_view uid) const;
  std::filesystem::path weights_path(std::string_view uid) const;

  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, InstanceRecord, std::less<>> records_;
  std::uint64_t revision_ = 0;
};

}  // namespace iodeep::pacs
