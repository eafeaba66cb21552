#include "iodeep/dicom/file.hpp"

#include <atomic>
#include <cstring>
#include <fstream>
#include <thread>

#include "iodeep/dicom/codec.hpp"
#include "iodeep/dicom/tags.hpp"
#include "iodeep/error.hpp"

namespace iodeep::dicom {

namespace {

constexpr std::size_t kPreambleSize = 128;
constexpr std::string_view kMagic = "DICM";

DataSet meta_without_group_length(const DataSet& meta) {
  DataSet out;
  for (const auto& [tag, e] : meta) {
    if (tag != tags::FileMetaInformationGroupLength) out.set(e);
  }
  return out;
}

/// Offset where group 0002 ends, scanning explicit-VR element headers.
std::size_t meta_end(std::span<const std::uint8_t> bytes, std::size_t start) {
  std::size_t pos = start;
  while (pos + 8 <= bytes.size()) {
    const std::uint16_t group = static_cast<std::uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
    if (group != 0x0002) break;
    const std::string_view vr_code(reinterpret_cast<const char*>(bytes.data() + pos + 4), 2);
    const auto vr = vr_from_code(vr_code);
    if (!vr) throw Error(Errc::UnknownVR, "unknown VR in file meta: " + std::string(vr_code));
    std::size_t length = 0;
    std::size_t header = 8;
    if (traits(*vr).long_length) {
      if (pos + 12 > bytes.size()) throw Error(Errc::TruncatedStream, "truncated file meta");
      length = bytes[pos + 8] | (bytes[pos + 9] << 8) | (bytes[pos + 10] << 16) |
               (static_cast<std::size_t>(bytes[pos + 11]) << 24);
      header = 12;
    } else {
      length = bytes[pos + 6] | (bytes[pos + 7] << 8);
    }
    pos += header + length;
  }
  if (pos > bytes.size()) throw Error(Errc::TruncatedStream, "truncated file meta");
  return pos;
}

}  // namespace

DicomFile DicomFile::from_body(DataSet body) {
  DicomFile f;
  f.file_meta.set_bytes(tags::FileMetaInformationVersion, VR::OB, Bytes{0x00, 0x01});
  f.file_meta.set_text(tags::MediaStorageSOPClassUID, VR::UI, body.text_or_empty(tags::SOPClassUID));
  f.file_meta.set_text(tags::MediaStorageSOPInstanceUID, VR::UI,
                       body.text_or_empty(tags::SOPInstanceUID));
  f.file_meta.set_text(tags::TransferSyntaxUID, VR::UI, std::string(kExplicitVRLittleEndian));
  f.file_meta.set_text(tags::ImplementationClassUID, VR::UI, std::string(kImplementationClassUID));
  f.file_meta.set_text(tags::ImplementationVersionName, VR::SH, std::string(kImplementationVersionName));
  f.body = std::move(body);
  return f;
}

std::string DicomFile::transfer_syntax() const {
  return file_meta.text(tags::TransferSyntaxUID).value_or(std::string(kExplicitVRLittleEndian));
}

std::vector<std::uint8_t> encode_file(const DicomFile& file) {
  auto meta = meta_without_group_length(file.file_meta);
  const auto meta_bytes = encode_dataset(meta);
  DataSet group_length;
  group_length.set_uint(tags::FileMetaInformationGroupLength, VR::UL,
                        static_cast<std::uint32_t>(meta_bytes.size()));
  const auto gl_bytes = encode_dataset(group_length);
  const auto body_bytes = encode_dataset(file.body, file.transfer_syntax());

  std::vector<std::uint8_t> out(kPreambleSize, 0);
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  out.insert(out.end(), gl_bytes.begin(), gl_bytes.end());
  out.insert(out.end(), meta_bytes.begin(), meta_bytes.end());
  out.insert(out.end(), body_bytes.begin(), body_bytes.end());
  return out;
}

DicomFile decode_file(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPreambleSize + kMagic.size() ||
      std::memcmp(bytes.data() + kPreambleSize, kMagic.data(), kMagic.size()) != 0) {
    throw Error(Errc::NotDicom, "missing DICM magic after 128-byte preamble");
  }
  const std::size_t start = kPreambleSize + kMagic.size();
  const std::size_t end = meta_end(bytes, start);
  DicomFile f;
  f.file_meta = decode_dataset(bytes.subspan(start, end - start));
  if (!f.file_meta.contains(tags::TransferSyntaxUID)) {
    throw Error(Errc::NotDicom, "file meta lacks TransferSyntaxUID");
  }
  f.body = decode_dataset(bytes.subspan(end), f.transfer_syntax());
  return f;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::IoFailure, "read failed for " + path.string());
  return out;
}

void write_bytes_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  static std::atomic<unsigned long long> counter{0};
  auto tmp = path;
  tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
         std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoFailure, "cannot create " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(Errc::IoFailure, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::IoFailure, "cannot move into place " + path.string());
  }
}

DicomFile read_file(const std::filesystem::path& path) { return decode_file(read_bytes(path)); }

void write_file(const DicomFile& file, const std::filesystem::path& path) {
  write_bytes_atomic(path, encode_file(file));
}

}  // namespace iodeep::dicom
