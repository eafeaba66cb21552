#include "iodeep/dicom/vr.hpp"

#include <array>
#include <cstdio>

#include "iodeep/dicom/tag.hpp"

namespace iodeep::dicom {

namespace {

struct Entry {
  VR vr;
  std::string_view code;
  VRTraits traits;
};

constexpr std::array<Entry, 17> kTable{{
    {VR::UT, "UT", {true, ' ', ValueKind::Text, 0, false}},
    {VR::PN, "PN", {false, ' ', ValueKind::Text, 0, true}},
    {VR::UI, "UI", {false, '\0', ValueKind::Text, 0, true}},
    {VR::CS, "CS", {false, ' ', ValueKind::Text, 0, true}},
    {VR::US, "US", {false, '\0', ValueKind::Integer, 2, false}},
    {VR::UL, "UL", {false, '\0', ValueKind::Integer, 4, false}},
    {VR::SQ, "SQ", {true, '\0', ValueKind::Sequence, 0, false}},
    {VR::DS, "DS", {false, ' ', ValueKind::Text, 0, true}},
    {VR::IS, "IS", {false, ' ', ValueKind::Text, 0, true}},
    {VR::LO, "LO", {false, ' ', ValueKind::Text, 0, true}},
    {VR::SH, "SH", {false, ' ', ValueKind::Text, 0, true}},
    {VR::DA, "DA", {false, ' ', ValueKind::Text, 0, true}},
    {VR::TM, "TM", {false, ' ', ValueKind::Text, 0, true}},
    {VR::OB, "OB", {true, '\0', ValueKind::Bytes, 0, false}},
    {VR::OW, "OW", {true, '\0', ValueKind::Bytes, 0, false}},
    {VR::FL, "FL", {false, '\0', ValueKind::Decimal, 4, false}},
    {VR::FD, "FD", {false, '\0', ValueKind::Decimal, 8, false}},
}};

}  // namespace

VRTraits traits(VR vr) noexcept { return kTable[static_cast<std::size_t>(vr)].traits; }

std::string_view code(VR vr) noexcept { return kTable[static_cast<std::size_t>(vr)].code; }

std::optional<VR> vr_from_code(std::string_view c) noexcept {
  for (const auto& e : kTable) {
    if (e.code == c) return e.vr;
  }
  return std::nullopt;
}

std::string Tag::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "(%04X, %04X)", group, element);
  return buf;
}

}  // namespace iodeep::dicom
