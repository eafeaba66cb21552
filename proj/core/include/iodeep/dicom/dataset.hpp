#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iodeep/dicom/tag.hpp"
#include "iodeep/dicom/vr.hpp"

namespace iodeep::dicom {

class DataSet;

using Strings = std::vector<std::string>;
using Integers = std::vector<std::uint32_t>;
using Decimals = std::vector<double>;
using Bytes = std::vector<std::uint8_t>;
using Items = std::vector<DataSet>;

using Value = std::variant<Strings, Integers, Decimals, Bytes, Items>;

/// One attribute. Text values never carry their wire padding; a text element
/// whose only value is "" is stored as an empty list.
struct DataElement {
  Tag tag;
  VR vr = VR::UT;
  Value value;

  std::size_t multiplicity() const;
  bool empty() const { return multiplicity() == 0; }
};

bool operator==(const DataElement& a, const DataElement& b);

/// Ordered Tag -> DataElement map. Iteration is in ascending tag order and
/// inserting an existing tag replaces it.
class DataSet {
 public:
  using Map = std::map<Tag, DataElement>;
  using const_iterator = Map::const_iterator;

  DataSet() = default;

  /// Throws Error(UnsupportedVR) when the value alternative does not match
  /// the VR's value kind.
  void set(DataElement element);

  void set_text(Tag tag, VR vr, std::string value);
  void set_texts(Tag tag, VR vr, Strings values);
  void set_uint(Tag tag, VR vr, std::uint32_t value);
  void set_uints(Tag tag, VR vr, Integers values);
  void set_decimals(Tag tag, VR vr, Decimals values);
  void set_bytes(Tag tag, VR vr, Bytes value);
  void set_items(Tag tag, Items items);
  /// Zero-length element (type 2 attribute present but empty).
  void set_empty(Tag tag, VR vr);

  bool contains(Tag tag) const { return elements_.contains(tag); }
  const DataElement* find(Tag tag) const;
  bool erase(Tag tag) { return elements_.erase(tag) > 0; }

  /// Throws Error(MissingTag) when absent.
  const DataElement& at(Tag tag) const;

  /// First text value, backslash-joined for multi-valued elements;
  /// nullopt when the tag is absent.
  std::optional<std::string> text(Tag tag) const;
  /// Text or "" when absent.
  std::string text_or_empty(Tag tag) const;
  std::optional<Strings> texts(Tag tag) const;
  /// First value of a US/UL element, or of an IS element parsed as integer.
  std::optional<std::uint32_t> uint(Tag tag) const;
  std::optional<Decimals> decimals(Tag tag) const;
  const Bytes* bytes(Tag tag) const;
  const Items* items(Tag tag) const;

  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  const_iterator begin() const { return elements_.begin(); }
  const_iterator end() const { return elements_.end(); }

  /// Elements of one group, e.g. all of (0010,xxxx).
  std::vector<const DataElement*> group(std::uint16_t group) const;

  friend bool operator==(const DataSet& a, const DataSet& b) {
    return a.elements_ == b.elements_;
  }

 private:
  Map elements_;
};

}  // namespace iodeep::dicom
