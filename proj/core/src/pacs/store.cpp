#include "iodeep/pacs/store.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "iodeep/dicom/file.hpp"
#include "iodeep/dicom/tags.hpp"
#include "iodeep/dicom/uid.hpp"
#include "iodeep/error.hpp"
#include "iodeep/iod/iodeep.hpp"
#include "iodeep/nn/weights.hpp"

namespace iodeep::pacs {

namespace fs = std::filesystem;
using nlohmann::json;
namespace tags = dicom::tags;

namespace {

constexpr std::string_view kJournal = "index.jsonl";

constexpr dicom::Tag kIndexedTags[] = {
    tags::SOPClassUID,      tags::SOPInstanceUID,   tags::StudyInstanceUID,
    tags::SeriesInstanceUID, tags::Modality,        tags::BodyPartExamined,
    tags::StudyDescription, tags::PatientID,        tags::FrameOfReferenceUID,
};

constexpr dicom::Tag kDisplayTags[] = {
    tags::PatientName,     tags::PatientBirthDate, tags::PatientSex,
    tags::StudyDate,       tags::StudyTime,        tags::AccessionNumber,
    tags::InstitutionName, tags::ReferringPhysicianName, tags::StudyID,
    tags::SeriesDescription, tags::SeriesNumber,   tags::InstanceNumber,
};

json to_json(const InstanceRecord& r) {
  return json{{"sop_instance_uid", r.sop_instance_uid}, {"sop_class_uid", r.sop_class_uid},
              {"study_uid", r.study_uid},               {"series_uid", r.series_uid},
              {"file", r.file},                         {"indexed", r.indexed},
              {"display", r.display}};
}

InstanceRecord from_json(const json& j) {
  InstanceRecord r;
  r.sop_instance_uid = j.at("sop_instance_uid").get<std::string>();
  r.sop_class_uid = j.at("sop_class_uid").get<std::string>();
  r.study_uid = j.at("study_uid").get<std::string>();
  r.series_uid = j.at("series_uid").get<std::string>();
  r.file = j.at("file").get<std::string>();
  for (const auto& [k, v] : j.at("indexed").items()) r.indexed.emplace(k, v.get<std::string>());
  for (const auto& [k, v] : j.at("display").items()) r.display.emplace(k, v.get<std::string>());
  return r;
}

std::string value_of(const TagMap& m, std::string_view key) {
  auto it = m.find(key);
  return it == m.end() ? std::string{} : it->second;
}

bool matches(const InstanceRecord& r, const std::vector<std::pair<std::string, std::string>>& filters) {
  for (const auto& [key, value] : filters) {
    if (value_of(r.indexed, key) != value) return false;
  }
  return true;
}

void require_uid(std::string_view uid) {
  if (!dicom::is_valid_uid(uid)) throw Error(Errc::NotFound, "'" + std::string(uid) + "' is not a UID");
}

}  // namespace

InstanceRecord record_of(const dicom::DataSet& body) {
  InstanceRecord r;
  r.sop_instance_uid = body.text_or_empty(tags::SOPInstanceUID);
  if (r.sop_instance_uid.empty()) throw Error(Errc::MissingTag, "instance lacks SOPInstanceUID");
  if (!dicom::is_valid_uid(r.sop_instance_uid)) {
    throw Error(Errc::InvalidUID, "SOPInstanceUID '" + r.sop_instance_uid + "' is malformed");
  }
  r.sop_class_uid = body.text_or_empty(tags::SOPClassUID);
  r.study_uid = body.text_or_empty(tags::StudyInstanceUID);
  r.series_uid = body.text_or_empty(tags::SeriesInstanceUID);
  r.file = "instances/" + r.sop_instance_uid + ".dcm";
  for (const auto tag : kIndexedTags) {
    if (const auto v = body.text(tag)) r.indexed.emplace(std::string(tags::keyword(tag)), *v);
  }
  if (const auto samples = body.uint(tags::SamplesPerPixel)) {
    r.indexed.emplace("SamplesPerPixel", std::to_string(*samples));
  }
  for (const auto tag : kDisplayTags) {
    if (const auto v = body.text(tag)) r.display.emplace(std::string(tags::keyword(tag)), *v);
  }
  if (const auto rows = body.uint(tags::Rows)) r.display.emplace("Rows", std::to_string(*rows));
  if (const auto cols = body.uint(tags::Columns)) r.display.emplace("Columns", std::to_string(*cols));
  if (iod::is_iodeep(body)) {
    try {
      const auto desc = iod::parse_iodeep(body);
      r.indexed.emplace("DnnUID", desc.dnn_uid);
      r.display.emplace("DnnName", desc.dnn_name);
    } catch (const Error& e) {
      spdlog::warn("instance {} looks like IODeep but does not parse: {}", r.sop_instance_uid, e.what());
    }
  }
  return r;
}

PacsStore::PacsStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "instances", ec);
  fs::create_directories(root_ / "weights", ec);
  if (!fs::is_directory(root_ / "instances") || !fs::is_directory(root_ / "weights")) {
    throw Error(Errc::IoFailure, "cannot create store layout under " + root_.string());
  }
  load_journal();
}

fs::path PacsStore::instance_path(std::string_view uid) const {
  return root_ / "instances" / (std::string(uid) + ".dcm");
}

fs::path PacsStore::weights_path(std::string_view uid) const {
  return root_ / "weights" / (std::string(uid) + ".iodw");
}

void PacsStore::load_journal() {
  std::unique_lock lock(mutex_);
  records_.clear();
  revision_ = 0;
  bool consistent = true;
  std::ifstream in(root_ / kJournal);
  if (in) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        const auto j = json::parse(line);
        auto r = from_json(j.at("record"));
        revision_ = std::max(revision_, j.at("revision").get<std::uint64_t>());
        records_.insert_or_assign(r.sop_instance_uid, std::move(r));
      } catch (const std::exception&) {
        consistent = false;
        break;
      }
    }
  }
  // The journal must describe exactly the files on disk.
  std::set<std::string> on_disk;
  for (const auto& entry : fs::directory_iterator(root_ / "instances")) {
    const auto name = entry.path().filename().string();
    if (name.find(".tmp.") != std::string::npos) {
      // Left behind by an interrupted write.
      std::error_code ec;
      fs::remove(entry.path(), ec);
    } else if (entry.path().extension() == ".dcm") {
      on_disk.insert(entry.path().stem().string());
    }
  }
  if (on_disk.size() != records_.size()) consistent = false;
  for (const auto& uid : on_disk) {
    if (!records_.contains(uid)) consistent = false;
  }
  lock.unlock();
  if (!consistent) {
    spdlog::info("index journal under {} is out of date, rebuilding", root_.string());
    rebuild_index();
  }
}

void PacsStore::rebuild_index() {
  std::unique_lock lock(mutex_);
  std::map<std::string, InstanceRecord, std::less<>> rebuilt;
  for (const auto& entry : fs::directory_iterator(root_ / "instances")) {
    const auto& path = entry.path();
    if (path.extension() != ".dcm") continue;
    try {
      auto file = dicom::read_file(path);
      auto r = record_of(file.body);
      if (path.stem().string() != r.sop_instance_uid) {
        spdlog::warn("skipping {}: file name does not match SOPInstanceUID", path.string());
        continue;
      }
      rebuilt.insert_or_assign(r.sop_instance_uid, std::move(r));
    } catch (const Error& e) {
      spdlog::warn("skipping unreadable instance {}: {}", path.string(), e.what());
    }
  }
  records_ = std::move(rebuilt);
  revision_ = std::max<std::uint64_t>(revision_, records_.size());
  write_snapshot();
}

void PacsStore::write_snapshot() {
  std::string text;
  for (const auto& [_, r] : records_) {
    text += json{{"revision", revision_}, {"record", to_json(r)}}.dump();
    text += '\n';
  }
  dicom::write_bytes_atomic(root_ / kJournal,
                            std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void PacsStore::append_journal(const InstanceRecord& record) {
  std::ofstream out(root_ / kJournal, std::ios::app);
  out << json{{"revision", revision_}, {"record", to_json(record)}}.dump() << '\n';
  out.flush();
  if (!out) throw Error(Errc::IoFailure, "cannot append to the index journal");
}

std::string PacsStore::store_instance(std::span<const std::uint8_t> file_bytes) {
  const auto file = dicom::decode_file(file_bytes);
  auto record = record_of(file.body);
  std::unique_lock lock(mutex_);
  dicom::write_bytes_atomic(instance_path(record.sop_instance_uid), file_bytes);
  ++revision_;
  append_journal(record);
  auto uid = record.sop_instance_uid;
  records_.insert_or_assign(uid, std::move(record));
  return uid;
}

std::vector<Summary> PacsStore::query(Level level, const TagMap& filters) const {
  std::vector<std::pair<std::string, std::string>> canonical;
  for (const auto& [key, value] : filters) canonical.emplace_back(canonical_filter_key(key), value);

  std::shared_lock lock(mutex_);
  std::vector<Summary> out;
  if (level == Level::Instance) {
    for (const auto& [uid, r] : records_) {
      if (!matches(r, canonical)) continue;
      Summary s{Level::Instance, uid, r.indexed};
      for (const auto& [k, v] : r.display) s.attributes.emplace(k, v);
      out.push_back(std::move(s));
    }
    return out;
  }

  // Groups that contain at least one matching instance; counts cover the
  // whole group.
  struct Group {
    const InstanceRecord* first = nullptr;
    std::size_t instances = 0;
    std::set<std::string> series;
    std::set<std::string> modalities;
    bool matched = false;
  };
  std::map<std::string, Group> groups;
  for (const auto& [uid, r] : records_) {
    const auto& key = level == Level::Study ? r.study_uid : r.series_uid;
    if (key.empty()) continue;
    auto& g = groups[key];
    if (!g.first) g.first = &r;
    ++g.instances;
    g.series.insert(r.series_uid);
    if (auto m = value_of(r.indexed, "Modality"); !m.empty()) g.modalities.insert(m);
    g.matched = g.matched || matches(r, canonical);
  }
  for (const auto& [uid, g] : groups) {
    if (!g.matched) continue;
    const auto& r = *g.first;
    Summary s{level, uid, {}};
    if (level == Level::Study) {
      s.attributes["StudyInstanceUID"] = uid;
      s.attributes["PatientID"] = value_of(r.indexed, "PatientID");
      s.attributes["StudyDescription"] = value_of(r.indexed, "StudyDescription");
      for (const auto* k : {"PatientName", "StudyDate", "StudyTime", "AccessionNumber", "StudyID"}) {
        s.attributes[k] = value_of(r.display, k);
      }
      std::string modalities;
      for (const auto& m : g.modalities) modalities += (modalities.empty() ? "" : "\\") + m;
      s.attributes["ModalitiesInStudy"] = modalities;
      s.attributes["NumberOfStudyRelatedSeries"] = std::to_string(g.series.size());
      s.attributes["NumberOfStudyRelatedInstances"] = std::to_string(g.instances);
    } else {
      s.attributes["SeriesInstanceUID"] = uid;
      s.attributes["StudyInstanceUID"] = r.study_uid;
      s.attributes["Modality"] = value_of(r.indexed, "Modality");
      s.attributes["BodyPartExamined"] = value_of(r.indexed, "BodyPartExamined");
      s.attributes["SeriesDescription"] = value_of(r.display, "SeriesDescription");
      s.attributes["SeriesNumber"] = value_of(r.display, "SeriesNumber");
      s.attributes["NumberOfSeriesRelatedInstances"] = std::to_string(g.instances);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::uint8_t> PacsStore::retrieve_instance(std::string_view sop_instance_uid) const {
  require_uid(sop_instance_uid);
  std::shared_lock lock(mutex_);
  if (!records_.contains(sop_instance_uid)) {
    throw Error(Errc::NotFound, "no instance " + std::string(sop_instance_uid));
  }
  return dicom::read_bytes(instance_path(sop_instance_uid));
}

dicom::DataSet PacsStore::dataset(std::string_view sop_instance_uid) const {
  return dicom::decode_file(retrieve_instance(sop_instance_uid)).body;
}

std::vector<std::uint8_t> PacsStore::retrieve_weights(std::string_view dnn_uid) const {
  require_uid(dnn_uid);
  std::shared_lock lock(mutex_);
  const auto path = weights_path(dnn_uid);
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(Errc::NotFound, "no weights for " + std::string(dnn_uid));
  return dicom::read_bytes(path);
}

void PacsStore::store_weights(std::string_view dnn_uid, std::span<const std::uint8_t> payload) {
  if (!dicom::is_valid_uid(dnn_uid)) {
    throw Error(Errc::InvalidUID, "'" + std::string(dnn_uid) + "' is not a valid DnnUID");
  }
  (void)nn::decode_weights(payload);
  std::unique_lock lock(mutex_);
  dicom::write_bytes_atomic(weights_path(dnn_uid), payload);
}

std::optional<InstanceRecord> PacsStore::record(std::string_view sop_instance_uid) const {
  std::shared_lock lock(mutex_);
  auto it = records_.find(sop_instance_uid);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<InstanceRecord> PacsStore::records() const {
  std::shared_lock lock(mutex_);
  std::vector<InstanceRecord> out;
  out.reserve(records_.size());
  for (const auto& [_, r] : records_) out.push_back(r);
  return out;
}

std::uint64_t PacsStore::revision() const {
  std::shared_lock lock(mutex_);
  return revision_;
}

}  // namespace iodeep::pacs
