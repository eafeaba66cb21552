#include "iodeep/pacs/repository.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "iodeep/dicom/tags.hpp"
#include "iodeep/error.hpp"

namespace iodeep::pacs {

namespace {

constexpr std::array<std::string_view, 11> kIndexed = {
    "SOPClassUID",      "SOPInstanceUID", "StudyInstanceUID", "SeriesInstanceUID",
    "Modality",         "BodyPartExamined", "StudyDescription", "SamplesPerPixel",
    "PatientID",        "FrameOfReferenceUID", "DnnUID",
};

constexpr std::string_view kLocatorPrefix = "pacs:weights/";
constexpr std::string_view kLocatorSuffix = ".iodw";

}  // namespace

std::string_view level_name(Level level) {
  switch (level) {
    case Level::Study: return "study";
    case Level::Series: return "series";
    case Level::Instance: return "instance";
  }
  return "instance";
}

std::optional<Level> level_from_name(std::string_view name) {
  if (name == "study" || name == "studies") return Level::Study;
  if (name == "series") return Level::Series;
  if (name == "instance" || name == "instances") return Level::Instance;
  return std::nullopt;
}

std::span<const std::string_view> indexed_keywords() { return kIndexed; }

std::string canonical_filter_key(std::string_view key) {
  if (std::find(kIndexed.begin(), kIndexed.end(), key) != kIndexed.end()) return std::string(key);
  if (key.size() == 8 && std::all_of(key.begin(), key.end(), [](unsigned char c) { return std::isxdigit(c); })) {
    const auto value = std::stoul(std::string(key), nullptr, 16);
    const dicom::Tag tag{static_cast<std::uint16_t>(value >> 16), static_cast<std::uint16_t>(value & 0xFFFF)};
    if (tag == dicom::Tag{0x0017, 0x1003}) return "DnnUID";
    const auto kw = dicom::tags::keyword(tag);
    if (!kw.empty() && std::find(kIndexed.begin(), kIndexed.end(), kw) != kIndexed.end()) return std::string(kw);
  }
  throw Error(Errc::UnindexedTagFilter, "'" + std::string(key) + "' is not an indexed attribute");
}

std::string weights_locator(std::string_view dnn_uid) {
  return std::string(kLocatorPrefix) + std::string(dnn_uid) + std::string(kLocatorSuffix);
}

std::optional<std::string> weights_locator_uid(std::string_view locator) {
  if (!locator.starts_with(kLocatorPrefix) || !locator.ends_with(kLocatorSuffix)) return std::nullopt;
  locator.remove_prefix(kLocatorPrefix.size());
  locator.remove_suffix(kLocatorSuffix.size());
  if (locator.empty()) return std::nullopt;
  return std::string(locator);
}

}  // namespace iodeep::pacs
