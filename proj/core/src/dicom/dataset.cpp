#include "iodeep/dicom/dataset.hpp"

#include <charconv>

#include "iodeep/error.hpp"

namespace iodeep::dicom {

namespace {

bool kind_matches(VR vr, const Value& value) {
  switch (traits(vr).kind) {
    case ValueKind::Text: return std::holds_alternative<Strings>(value);
    case ValueKind::Integer: return std::holds_alternative<Integers>(value);
    case ValueKind::Decimal: return std::holds_alternative<Decimals>(value);
    case ValueKind::Bytes: return std::holds_alternative<Bytes>(value);
    case ValueKind::Sequence: return std::holds_alternative<Items>(value);
  }
  return false;
}

std::string join(const Strings& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += '\\';
    out += values[i];
  }
  return out;
}

}  // namespace

std::size_t DataElement::multiplicity() const {
  return std::visit([](const auto& v) -> std::size_t {
    using T = std::decay_t<decltype(v)>;
    if constexpr (std::is_same_v<T, Bytes>) {
      return v.empty() ? 0 : 1;
    } else {
      return v.size();
    }
  }, value);
}

bool operator==(const DataElement& a, const DataElement& b) {
  return a.tag == b.tag && a.vr == b.vr && a.value == b.value;
}

void DataSet::set(DataElement element) {
  if (!kind_matches(element.vr, element.value)) {
    throw Error(Errc::UnsupportedVR, "value kind does not match VR " +
                                         std::string(code(element.vr)) + " for " +
                                         element.tag.str());
  }
  if (auto* s = std::get_if<Strings>(&element.value); s && s->size() == 1 && s->front().empty()) {
    s->clear();
  }
  auto tag = element.tag;
  elements_.insert_or_assign(tag, std::move(element));
}

void DataSet::set_text(Tag tag, VR vr, std::string value) {
  set({tag, vr, Strings{std::move(value)}});
}

void DataSet::set_texts(Tag tag, VR vr, Strings values) { set({tag, vr, std::move(values)}); }

void DataSet::set_uint(Tag tag, VR vr, std::uint32_t value) { set({tag, vr, Integers{value}}); }

void DataSet::set_uints(Tag tag, VR vr, Integers values) { set({tag, vr, std::move(values)}); }

void DataSet::set_decimals(Tag tag, VR vr, Decimals values) { set({tag, vr, std::move(values)}); }

void DataSet::set_bytes(Tag tag, VR vr, Bytes value) { set({tag, vr, std::move(value)}); }

void DataSet::set_items(Tag tag, Items items) { set({tag, VR::SQ, std::move(items)}); }

void DataSet::set_empty(Tag tag, VR vr) {
  switch (traits(vr).kind) {
    case ValueKind::Text: set({tag, vr, Strings{}}); break;
    case ValueKind::Integer: set({tag, vr, Integers{}}); break;
    case ValueKind::Decimal: set({tag, vr, Decimals{}}); break;
    case ValueKind::Bytes: set({tag, vr, Bytes{}}); break;
    case ValueKind::Sequence: set({tag, vr, Items{}}); break;
  }
}

const DataElement* DataSet::find(Tag tag) const {
  auto it = elements_.find(tag);
  return it == elements_.end() ? nullptr : &it->second;
}

const DataElement& DataSet::at(Tag tag) const {
  if (const auto* e = find(tag)) return *e;
  throw Error(Errc::MissingTag, "missing tag " + tag.str());
}

std::optional<std::string> DataSet::text(Tag tag) const {
  const auto* e = find(tag);
  if (!e) return std::nullopt;
  if (const auto* s = std::get_if<Strings>(&e->value)) return join(*s);
  return std::nullopt;
}

std::string DataSet::text_or_empty(Tag tag) const { return text(tag).value_or(std::string{}); }

std::optional<Strings> DataSet::texts(Tag tag) const {
  const auto* e = find(tag);
  if (!e) return std::nullopt;
  if (const auto* s = std::get_if<Strings>(&e->value)) return *s;
  return std::nullopt;
}

std::optional<std::uint32_t> DataSet::uint(Tag tag) const {
  const auto* e = find(tag);
  if (!e) return std::nullopt;
  if (const auto* i = std::get_if<Integers>(&e->value)) {
    if (i->empty()) return std::nullopt;
    return i->front();
  }
  if (const auto* s = std::get_if<Strings>(&e->value); s && !s->empty()) {
    // IS / DS carrying an integer, leading and trailing spaces allowed.
    std::string_view v = s->front();
    while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
    while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
    if (!v.empty() && v.front() == '+') v.remove_prefix(1);
    std::uint32_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec == std::errc{} && ptr == v.data() + v.size()) return out;
  }
  return std::nullopt;
}

std::optional<Decimals> DataSet::decimals(Tag tag) const {
  const auto* e = find(tag);
  if (!e) return std::nullopt;
  if (const auto* d = std::get_if<Decimals>(&e->value)) return *d;
  if (const auto* s = std::get_if<Strings>(&e->value)) {
    Decimals out;
    out.reserve(s->size());
    for (const auto& item : *s) {
      std::string_view v = item;
      while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
      while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
      if (!v.empty() && v.front() == '+') v.remove_prefix(1);
      double x = 0;
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
      if (ec != std::errc{} || ptr != v.data() + v.size()) return std::nullopt;
      out.push_back(x);
    }
    return out;
  }
  return std::nullopt;
}

const Bytes* DataSet::bytes(Tag tag) const {
  const auto* e = find(tag);
  return e ? std::get_if<Bytes>(&e->value) : nullptr;
}

const Items* DataSet::items(Tag tag) const {
  const auto* e = find(tag);
  return e ? std::get_if<Items>(&e->value) : nullptr;
}

std::vector<const DataElement*> DataSet::group(std::uint16_t g) const {
  std::vector<const DataElement*> out;
  for (auto it = elements_.lower_bound(Tag(g, 0)); it != elements_.end() && it->first.group == g;
       ++it) {
    out.push_back(&it->second);
  }
  return out;
}

}  // namespace iodeep::dicom
