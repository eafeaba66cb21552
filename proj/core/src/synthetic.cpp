#include "iodeep/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "iodeep/dicom/uid.hpp"
#include "iodeep/error.hpp"
#include "iodeep/iod/slice.hpp"

namespace iodeep::synthetic {

namespace {

constexpr std::string_view kSyntheticRoot = "1.2.826.0.1.3680043.10.1147.2";

double profile(const Blob& b, double x, double y) {
  const double dx = x - b.cx;
  const double dy = y - b.cy;
  return std::exp(-(dx * dx + dy * dy) / (2 * b.sigma * b.sigma));
}

}  // namespace

std::vector<std::uint8_t> truth_mask(const std::vector<Blob>& blobs, std::uint32_t rows, std::uint32_t columns) {
  std::vector<std::uint8_t> mask(std::size_t{rows} * columns, 0);
  for (std::uint32_t y = 0; y < rows; ++y) {
    for (std::uint32_t x = 0; x < columns; ++x) {
      for (const auto& b : blobs) {
        if (profile(b, x, y) >= 0.5) {
          mask[std::size_t{y} * columns + x] = 1;
          break;
        }
      }
    }
  }
  return mask;
}

BlobSlice generate_blobs(std::uint64_t seed, const BlobOptions& o) {
  if (o.min_blobs > o.max_blobs || o.rows < 1 || o.columns < 1 || o.bits_stored < 1 || o.bits_stored > 16) {
    throw Error(Errc::InvalidRequest, "inconsistent blob options");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> count_dist(o.min_blobs, o.max_blobs);
  std::uniform_real_distribution<double> xs(o.margin, o.columns - 1 - o.margin);
  std::uniform_real_distribution<double> ys(o.margin, o.rows - 1 - o.margin);
  std::uniform_real_distribution<double> sigmas(o.min_sigma, o.max_sigma);
  std::uniform_real_distribution<double> amplitudes(o.min_amplitude, o.max_amplitude);
  std::normal_distribution<double> noise(0.0, o.noise_sigma);

  BlobSlice s;
  s.rows = o.rows;
  s.columns = o.columns;
  const auto wanted = count_dist(rng);
  // Rejection sampling of centres; a crowded layout just ends up with fewer blobs.
  for (int attempt = 0; attempt < 1000 && s.blobs.size() < wanted; ++attempt) {
    Blob b{xs(rng), ys(rng), sigmas(rng), amplitudes(rng)};
    const bool clear = std::all_of(s.blobs.begin(), s.blobs.end(), [&](const Blob& other) {
      return std::hypot(b.cx - other.cx, b.cy - other.cy) >= o.min_separation;
    });
    if (clear) s.blobs.push_back(b);
  }

  const std::size_t n = std::size_t{o.rows} * o.columns;
  s.intensity.resize(n);
  s.pixel_data.resize(n * 2);
  const double max_value = static_cast<double>((1u << o.bits_stored) - 1);
  for (std::uint32_t y = 0; y < o.rows; ++y) {
    for (std::uint32_t x = 0; x < o.columns; ++x) {
      double v = o.noise_sigma > 0 ? noise(rng) : 0.0;
      for (const auto& b : s.blobs) v += b.amplitude * profile(b, x, y);
      v = std::clamp(v, 0.0, 1.0);
      const std::size_t i = std::size_t{y} * o.columns + x;
      s.intensity[i] = static_cast<float>(v);
      const auto q = static_cast<std::uint16_t>(std::lround(v * max_value));
      s.pixel_data[2 * i] = static_cast<std::uint8_t>(q & 0xFF);
      s.pixel_data[2 * i + 1] = static_cast<std::uint8_t>(q >> 8);
    }
  }
  s.truth = truth_mask(s.blobs, o.rows, o.columns);
  return s;
}

SyntheticSeries generate_series(std::uint64_t seed, std::uint32_t count, const SeriesOptions& options) {
  const auto base = dicom::make_uid(kSyntheticRoot, seed);
  SyntheticSeries out;
  for (std::uint32_t i = 0; i < count; ++i) {
    auto slice = generate_blobs(seed * 1000003ULL + i, options.blobs);
    iod::ImageSpec spec;
    spec.sop_class_uid = std::string(dicom::kMRImageStorage);
    if (options.modality == "CT") spec.sop_class_uid = std::string(dicom::kCTImageStorage);
    spec.sop_instance_uid = base + ".1." + std::to_string(i + 1);
    spec.study_instance_uid = base;
    spec.series_instance_uid = base + ".1";
    spec.frame_of_reference_uid = base + ".2";
    spec.modality = options.modality;
    spec.body_part_examined = options.body_part;
    spec.study_description = options.study_description;
    spec.patient_name = options.patient_name;
    spec.patient_id = options.patient_id;
    spec.patient_birth_date = "19700101";
    spec.patient_sex = "O";
    spec.study_date = "20260101";
    spec.study_time = "120000";
    spec.accession_number = "SYN" + std::to_string(seed);
    spec.institution_name = "Synthetic";
    spec.study_id = "1";
    spec.instance_number = i + 1;
    spec.pixel.samples_per_pixel = 1;
    spec.pixel.rows = slice.rows;
    spec.pixel.columns = slice.columns;
    spec.pixel.photometric_interpretation = "MONOCHROME2";
    spec.pixel.bits_allocated = 16;
    spec.pixel.bits_stored = options.blobs.bits_stored;
    spec.pixel.pixel_representation = 0;
    spec.pixel_data = slice.pixel_data;
    out.images.push_back(iod::build_image(spec));
    out.slices.push_back(std::move(slice));
  }
  return out;
}

double dice(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  if (a.size() != b.size()) throw Error(Errc::ShapeMismatch, "masks differ in size");
  std::size_t both = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    both += (a[i] && b[i]);
    total += (a[i] != 0) + (b[i] != 0);
  }
  return total == 0 ? 1.0 : 2.0 * static_cast<double>(both) / static_cast<double>(total);
}

}  // namespace iodeep::synthetic
