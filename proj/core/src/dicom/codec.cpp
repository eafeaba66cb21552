#include "iodeep/dicom/codec.hpp"

#include <bit>
#include <cstring>
#include <limits>

#include "iodeep/error.hpp"

namespace iodeep::dicom {

namespace {

constexpr std::uint32_t kUndefinedLength = 0xFFFFFFFFu;
constexpr Tag kItem{0xFFFE, 0xE000};
constexpr Tag kItemDelimitation{0xFFFE, 0xE00D};
constexpr Tag kSequenceDelimitation{0xFFFE, 0xE0DD};

static_assert(std::endian::native == std::endian::little,
              "codec assumes a little-endian host");

void require_syntax(std::string_view ts) {
  if (ts != kExplicitVRLittleEndian) {
    throw Error(Errc::UnsupportedTransferSyntax,
                "unsupported transfer syntax " + std::string(ts));
  }
}

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void tag(Tag t) {
    u16(t.group);
    u16(t.element);
  }

 private:
  std::vector<std::uint8_t>& out_;
};

void check_private_creators(const DataSet& ds) {
  for (const auto& [tag, element] : ds) {
    if (!tag.is_private() || tag.element == 0x0000 || tag.is_private_creator()) continue;
    bool ok = false;
    if (tag.element >= 0x0100) {
      const auto* creator = ds.find(tag.private_creator_slot());
      ok = creator != nullptr && traits(creator->vr).kind == ValueKind::Text;
    }
    if (!ok) {
      throw Error(Errc::OddGroupWithoutPrivateCreator,
                  "private element " + tag.str() + " has no private creator");
    }
  }
}

std::vector<std::uint8_t> value_bytes(const DataElement& e);

void encode_into(const DataSet& ds, std::vector<std::uint8_t>& out);

std::vector<std::uint8_t> value_bytes(const DataElement& e) {
  std::vector<std::uint8_t> out;
  const auto t = traits(e.vr);
  std::visit([&](const auto& v) {
    using T = std::decay_t<decltype(v)>;
    if constexpr (std::is_same_v<T, Strings>) {
      if (!t.multi_valued && v.size() > 1) {
        throw Error(Errc::UnsupportedVR, std::string(code(e.vr)) + " is single-valued at " + e.tag.str());
      }
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out.push_back('\\');
        out.insert(out.end(), v[i].begin(), v[i].end());
      }
    } else if constexpr (std::is_same_v<T, Integers>) {
      Writer w(out);
      for (auto x : v) {
        if (t.value_size == 2) {
          if (x > 0xFFFF) {
            throw Error(Errc::UnsupportedVR, "value out of range for US at " + e.tag.str());
          }
          w.u16(static_cast<std::uint16_t>(x));
        } else {
          w.u32(x);
        }
      }
    } else if constexpr (std::is_same_v<T, Decimals>) {
      Writer w(out);
      for (double x : v) {
        if (t.value_size == 4) {
          const auto f = static_cast<float>(x);
          w.raw(&f, 4);
        } else {
          w.raw(&x, 8);
        }
      }
    } else if constexpr (std::is_same_v<T, Bytes>) {
      out = v;
    } else {
      Writer w(out);
      for (const auto& item : v) {
        std::vector<std::uint8_t> body;
        encode_into(item, body);
        w.tag(kItem);
        w.u32(static_cast<std::uint32_t>(body.size()));
        w.raw(body.data(), body.size());
      }
    }
  }, e.value);
  if (out.size() % 2 != 0) out.push_back(static_cast<std::uint8_t>(t.padding));
  return out;
}

void encode_into(const DataSet& ds, std::vector<std::uint8_t>& out) {
  check_private_creators(ds);
  Writer w(out);
  for (const auto& [tag, element] : ds) {
    const auto payload = value_bytes(element);
    const auto t = traits(element.vr);
    w.tag(tag);
    const auto c = code(element.vr);
    w.raw(c.data(), 2);
    if (t.long_length) {
      if (payload.size() >= kUndefinedLength) {
        throw Error(Errc::ValueTooLong, "value too long at " + tag.str());
      }
      w.u16(0);
      w.u32(static_cast<std::uint32_t>(payload.size()));
    } else {
      if (payload.size() > 0xFFFE) {
        throw Error(Errc::ValueTooLong, std::string(c) + " value exceeds 65534 bytes at " + tag.str());
      }
      w.u16(static_cast<std::uint16_t>(payload.size()));
    }
    w.raw(payload.data(), payload.size());
  }
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const { return pos_ >= bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t pos() const { return pos_; }

  void need(std::size_t n) const {
    if (remaining() < n) {
      throw Error(Errc::TruncatedStream, "stream ends at offset " + std::to_string(bytes_.size()) +
                                             ", needed " + std::to_string(n) + " more bytes at " +
                                             std::to_string(pos_));
    }
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  Tag tag() {
    auto g = u16();
    auto e = u16();
    return Tag(g, e);
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

DataSet decode_items_body(Reader& r, bool until_item_delimiter, DecodeDiagnostics& diag);

Strings split_text(std::span<const std::uint8_t> raw, VR vr) {
  std::string s(raw.begin(), raw.end());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) s.pop_back();
  Strings out;
  if (s.empty()) return out;
  if (!traits(vr).multi_valued) {
    out.push_back(std::move(s));
    return out;
  }
  std::size_t start = 0;
  while (true) {
    auto p = s.find('\\', start);
    if (p == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
  return out;
}

Items decode_sequence(Reader& r, std::uint32_t length, DecodeDiagnostics& diag) {
  Items items;
  if (length == kUndefinedLength) {
    while (true) {
      const Tag t = r.tag();
      const auto len = r.u32();
      if (t == kSequenceDelimitation) break;
      if (t != kItem) throw Error(Errc::TruncatedStream, "expected item tag, found " + t.str());
      if (len == kUndefinedLength) {
        items.push_back(decode_items_body(r, true, diag));
      } else {
        Reader sub(r.take(len));
        items.push_back(decode_items_body(sub, false, diag));
      }
    }
    return items;
  }
  Reader seq(r.take(length));
  while (!seq.done()) {
    const Tag t = seq.tag();
    const auto len = seq.u32();
    if (t != kItem) throw Error(Errc::TruncatedStream, "expected item tag, found " + t.str());
    if (len == kUndefinedLength) {
      items.push_back(decode_items_body(seq, true, diag));
    } else {
      Reader sub(seq.take(len));
      items.push_back(decode_items_body(sub, false, diag));
    }
  }
  return items;
}

DataSet decode_items_body(Reader& r, bool until_item_delimiter, DecodeDiagnostics& diag) {
  DataSet ds;
  std::optional<Tag> last;
  while (!r.done()) {
    const Tag tag = r.tag();
    if (tag.group == 0xFFFE) {
      r.u32();
      if (until_item_delimiter && tag == kItemDelimitation) return ds;
      throw Error(Errc::TruncatedStream, "unexpected delimiter " + tag.str());
    }
    const auto vr_bytes = r.take(2);
    const std::string_view vr_code(reinterpret_cast<const char*>(vr_bytes.data()), 2);
    const auto vr = vr_from_code(vr_code);
    if (!vr) {
      throw Error(Errc::UnknownVR, "unknown VR '" + std::string(vr_code) + "' at " + tag.str());
    }
    const auto t = traits(*vr);
    std::uint32_t length = 0;
    if (t.long_length) {
      r.u16();
      length = r.u32();
    } else {
      length = r.u16();
    }

    if (last && !(*last < tag)) {
      diag.non_monotonic_tags = true;
      ++diag.non_monotonic_count;
    }
    last = tag;

    DataElement e{tag, *vr, Strings{}};
    if (t.kind == ValueKind::Sequence) {
      e.value = decode_sequence(r, length, diag);
    } else {
      if (length == kUndefinedLength) {
        throw Error(Errc::UnsupportedVR, "undefined length for " + std::string(vr_code) + " at " + tag.str());
      }
      const auto raw = r.take(length);
      switch (t.kind) {
        case ValueKind::Text: e.value = split_text(raw, *vr); break;
        case ValueKind::Integer: {
          if (raw.size() % t.value_size != 0) {
            throw Error(Errc::TruncatedStream, "partial value at " + tag.str());
          }
          Integers v;
          for (std::size_t i = 0; i < raw.size(); i += t.value_size) {
            std::uint32_t x = 0;
            for (std::size_t b = 0; b < t.value_size; ++b) x |= std::uint32_t{raw[i + b]} << (8 * b);
            v.push_back(x);
          }
          e.value = std::move(v);
          break;
        }
        case ValueKind::Decimal: {
          if (raw.size() % t.value_size != 0) {
            throw Error(Errc::TruncatedStream, "partial value at " + tag.str());
          }
          Decimals v;
          for (std::size_t i = 0; i < raw.size(); i += t.value_size) {
            if (t.value_size == 4) {
              float f;
              std::memcpy(&f, raw.data() + i, 4);
              v.push_back(f);
            } else {
              double d;
              std::memcpy(&d, raw.data() + i, 8);
              v.push_back(d);
            }
          }
          e.value = std::move(v);
          break;
        }
        case ValueKind::Bytes: e.value = Bytes(raw.begin(), raw.end()); break;
        case ValueKind::Sequence: break;
      }
    }
    ds.set(std::move(e));
  }
  if (until_item_delimiter) throw Error(Errc::TruncatedStream, "missing item delimiter");
  return ds;
}

}  // namespace

std::vector<std::uint8_t> encode_dataset(const DataSet& ds, std::string_view transfer_syntax) {
  require_syntax(transfer_syntax);
  std::vector<std::uint8_t> out;
  encode_into(ds, out);
  return out;
}

DataSet decode_dataset(std::span<const std::uint8_t> bytes, std::string_view transfer_syntax,
                       DecodeDiagnostics* diagnostics) {
  require_syntax(transfer_syntax);
  DecodeDiagnostics local;
  Reader r(bytes);
  auto ds = decode_items_body(r, false, diagnostics ? *diagnostics : local);
  return ds;
}

}  // namespace iodeep::dicom
