#include "iodeep/nn/weights.hpp"

#include <cstring>

#include <zlib.h>

#include "iodeep/base64.hpp"
#include "iodeep/dicom/file.hpp"
#include "iodeep/error.hpp"

namespace iodeep::nn {

namespace {

constexpr std::string_view kMagic = "IODW";
constexpr std::size_t kMinimumSize = 4 + 4 + 4 + 4;
constexpr std::uint32_t kMaxNameLength = 4096;

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, bytes.data() + pos, chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> b) : bytes_(b) {}
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(Errc::MalformedWeights, "weights payload ends early");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

}  // namespace

const Tensor* WeightStore::find(std::string_view name) const {
  auto it = entries.find(name);
  return it == entries.end() ? nullptr : &it->second;
}

std::size_t WeightStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [_, t] : entries) n += t.size();
  return n;
}

std::vector<std::uint8_t> encode_weights(const WeightStore& store) {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  put_u32(out, store.format_version);
  put_u32(out, static_cast<std::uint32_t>(store.entries.size()));
  for (const auto& [name, tensor] : store.entries) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    put_u32(out, static_cast<std::uint32_t>(tensor.shape.rank()));
    for (auto d : tensor.shape.dims()) put_u32(out, d);
    const auto offset = out.size();
    out.resize(offset + tensor.data.size() * 4);
    std::memcpy(out.data() + offset, tensor.data.data(), tensor.data.size() * 4);
  }
  put_u32(out, crc32_of(out));
  return out;
}

WeightStore decode_weights(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMinimumSize) {
    throw Error(Errc::ChecksumMismatch, "weights payload too short to carry a checksum");
  }
  const auto body = bytes.first(bytes.size() - 4);
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) stored |= std::uint32_t{bytes[bytes.size() - 4 + i]} << (8 * i);
  if (crc32_of(body) != stored) {
    throw Error(Errc::ChecksumMismatch, "weights CRC-32 does not match payload");
  }
  Cursor c(body);
  const auto magic = c.take(4);
  if (std::memcmp(magic.data(), kMagic.data(), 4) != 0) {
    throw Error(Errc::MalformedWeights, "weights payload lacks the IODW magic");
  }
  WeightStore store;
  store.format_version = c.u32();
  if (store.format_version != kWeightsFormatVersion) {
    throw Error(Errc::FormatVersionUnsupported,
                "weights format version " + std::to_string(store.format_version) + " is not supported");
  }
  const auto count = c.u32();
  std::string previous;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = c.u32();
    if (name_len == 0 || name_len > kMaxNameLength) throw Error(Errc::MalformedWeights, "bad entry name length");
    const auto name_bytes = c.take(name_len);
    std::string name(name_bytes.begin(), name_bytes.end());
    if (i > 0 && !(previous < name)) {
      throw Error(Errc::MalformedWeights, "weights entries must be unique and sorted by name");
    }
    const auto rank = c.u32();
    if (rank < 1 || rank > 4) throw Error(Errc::MalformedWeights, "entry '" + name + "' has bad rank");
    std::vector<std::uint32_t> dims(rank);
    std::size_t volume = 1;
    for (auto& d : dims) {
      d = c.u32();
      if (d == 0) throw Error(Errc::MalformedWeights, "entry '" + name + "' has a zero dimension");
      volume *= d;
      if (volume > body.size()) throw Error(Errc::MalformedWeights, "entry '" + name + "' is too large");
    }
    const auto payload = c.take(volume * 4);
    std::vector<float> data(volume);
    std::memcpy(data.data(), payload.data(), payload.size());
    store.entries.emplace(name, Tensor(TensorShape(std::move(dims)), std::move(data)));
    previous = std::move(name);
  }
  if (!c.done()) throw Error(Errc::MalformedWeights, "trailing bytes after the last entry");
  return store;
}

WeightStore load_weights(std::string_view locator) {
  constexpr std::string_view kData = "data:";
  constexpr std::string_view kFile = "file://";
  if (locator.starts_with(kData)) {
    const auto comma = locator.find(',');
    if (comma == std::string_view::npos || locator.substr(0, comma).find(";base64") == std::string_view::npos) {
      throw Error(Errc::WeightsNotFound, "inline weights must be a base64 data: URI");
    }
    auto payload = base64_decode(locator.substr(comma + 1));
    if (!payload) throw Error(Errc::ChecksumMismatch, "inline weights are not valid base64");
    return decode_weights(*payload);
  }
  std::string path;
  if (locator.starts_with(kFile)) {
    path = percent_decode(locator.substr(kFile.size()));
  } else if (locator.find("://") != std::string_view::npos ||
             (locator.find(':') != std::string_view::npos && locator.find(':') > 1 &&
              locator.find('/') > locator.find(':'))) {
    throw Error(Errc::WeightsNotFound, "cannot resolve weights locator '" + std::string(locator) + "' locally");
  } else {
    path = std::string(locator);
  }
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(Errc::WeightsNotFound, "weights file not found: " + path);
  }
  return decode_weights(dicom::read_bytes(path));
}

void save_weights(const WeightStore& store, const std::filesystem::path& path) {
  dicom::write_bytes_atomic(path, encode_weights(store));
}

std::string inline_weights_uri(std::span<const std::uint8_t> payload) {
  return "data:application/x-iodeep-weights;base64," + base64_encode(payload);
}

}  // namespace iodeep::nn
