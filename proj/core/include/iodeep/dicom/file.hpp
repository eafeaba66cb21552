#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "iodeep/dicom/dataset.hpp"

namespace iodeep::dicom {

inline constexpr std::string_view kImplementationClassUID = "1.2.826.0.1.3680043.10.1147.0.1";
inline constexpr std::string_view kImplementationVersionName = "IODEEP_010";

/// Part-10 file: 128-byte preamble, "DICM", group-0002 meta, body.
struct DicomFile {
  DataSet file_meta;
  DataSet body;

  /// Meta header for `body`: media storage class and instance taken from
  /// the body's SOPClassUID / SOPInstanceUID.
  static DicomFile from_body(DataSet body);

  std::string transfer_syntax() const;

  friend bool operator==(const DicomFile&, const DicomFile&) = default;
};

/// Meta group length (0002,0000) is recomputed on every write.
std::vector<std::uint8_t> encode_file(const DicomFile& file);
/// Throws Error(NotDicom) without the preamble magic and
/// Error(UnsupportedTransferSyntax) for bodies we cannot decode.
DicomFile decode_file(std::span<const std::uint8_t> bytes);

DicomFile read_file(const std::filesystem::path& path);
void write_file(const DicomFile& file, const std::filesystem::path& path);

/// Whole-file read/write helpers that raise Error(IoFailure).
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames it into place.
void write_bytes_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace iodeep::dicom
