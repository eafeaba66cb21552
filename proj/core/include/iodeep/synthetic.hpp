#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iodeep/dicom/dataset.hpp"

/// Gaussian-blob slices with known ground truth, for demos, tests and
/// training the toy segmentation network.
namespace iodeep::synthetic {

struct Blob {
  double cx = 0;  // column
  double cy = 0;  // row
  double sigma = 4;
  double amplitude = 1;
};

struct BlobOptions {
  std::uint32_t rows = 64;
  std::uint32_t columns = 64;
  std::uint32_t min_blobs = 1;
  std::uint32_t max_blobs = 3;
  double min_sigma = 3.0;
  double max_sigma = 5.0;
  double min_amplitude = 0.6;
  double max_amplitude = 1.0;
  /// Minimum centre distance between blobs, and from the border.
  double min_separation = 20.0;
  double margin = 10.0;
  double noise_sigma = 0.02;
  std::uint32_t bits_stored = 12;
};

struct BlobSlice {
  std::uint32_t rows = 0;
  std::uint32_t columns = 0;
  std::vector<Blob> blobs;
  /// Row-major intensities in [0, 1], before quantization.
  std::vector<float> intensity;
  /// Row-major 0/1: some blob's unit-peak profile exp(-r^2 / 2 sigma^2) is
  /// at least 0.5 there.
  std::vector<std::uint8_t> truth;
  /// Stored 16-bit samples (little endian), bits_stored significant.
  std::vector<std::uint8_t> pixel_data;
};

/// Deterministic for a given seed and options.
BlobSlice generate_blobs(std::uint64_t seed, const BlobOptions& options = {});

/// Ground-truth mask of `blobs` on a rows x columns grid.
std::vector<std::uint8_t> truth_mask(const std::vector<Blob>& blobs, std::uint32_t rows, std::uint32_t columns);

struct SeriesOptions {
  std::string modality = "MR";
  std::string body_part = "BRAIN";
  std::string study_description = "Synthetic blob study";
  std::string patient_name = "SYNTHETIC^PATIENT";
  std::string patient_id = "SYN0001";
  BlobOptions blobs;
};

struct SyntheticSeries {
  std::vector<dicom::DataSet> images;
  std::vector<BlobSlice> slices;
};

/// `count` slices sharing one study, series and frame of reference; UIDs
/// are derived from `seed`, so equal seeds give equal series.
SyntheticSeries generate_series(std::uint64_t seed, std::uint32_t count, const SeriesOptions& options = {});

/// Dice coefficient of two 0/1 masks; 1 when both are empty.
double dice(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

}  // namespace iodeep::synthetic
