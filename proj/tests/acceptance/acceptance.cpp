// Acceptance run: one PASS/FAIL line per primary criterion, exit status 1
// when any of them fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "iodeep/dicom/codec.hpp"
#include "iodeep/dicom/file.hpp"
#include "iodeep/dicom/tags.hpp"
#include "iodeep/error.hpp"
#include "iodeep/iod/iodeep.hpp"
#include "iodeep/nn/model.hpp"
#include "iodeep/nn/ops.hpp"
#include "iodeep/nn/preprocess.hpp"
#include "iodeep/pacs/client.hpp"
#include "iodeep/pacs/server.hpp"
#include "iodeep/rt/contour.hpp"
#include "iodeep/selection.hpp"
#include "iodeep/synthetic.hpp"

using namespace iodeep;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;
namespace tags = dicom::tags;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

// --- codec ---------------------------------------------------------------------

Outcome codec() {
  constexpr int kCases = 1000;
  constexpr double kBudget = 30.0;
  std::mt19937_64 rng(1000);
  const auto t0 = Clock::now();
  int failures = 0;
  for (int i = 0; i < kCases; ++i) {
    const auto ds = oracle::random_dataset(rng);
    const auto bytes = dicom::encode_dataset(ds);
    const auto back = dicom::decode_dataset(bytes);
    if (!(back == ds) || dicom::encode_dataset(back) != bytes) ++failures;
  }
  const double t = seconds_since(t0);
  return {failures == 0 && t < kBudget, std::to_string(kCases - failures) + "/" + std::to_string(kCases) +
                                            " round trips byte-identical in " + fmt(t) + " s (limit " +
                                            fmt(kBudget, 0) + " s)"};
}

// --- selection ----------------------------------------------------------------

Outcome selection_table() {
  const std::vector<std::string> modalities{"MR", "CT", "US"};
  const std::vector<std::uint32_t> samples{1, 3};
  const std::vector<std::string> body_parts{"BRAIN", "BREAST", "ABDOMEN", ""};
  const std::vector<std::optional<std::string>> descriptions{std::nullopt, "Brain tumor protocol",
                                                             "Chest and  ABDOMEN survey"};

  std::vector<iod::SliceTagSet> slices;
  for (const auto& m : modalities)
    for (auto s : samples)
      for (const auto& b : body_parts)
        for (const auto& d : descriptions) {
          iod::SliceTagSet t;
          t.modality = m;
          t.samples_per_pixel = s;
          if (!b.empty()) t.body_part_examined = b;
          t.study_description = d;
          slices.push_back(t);
        }

  // Candidate kinds over the same pools; the empty body part is a
  // candidate that can never match.
  struct Kind {
    std::string modality;
    std::uint32_t samples;
    std::string body_part;
  };
  std::vector<Kind> kinds;
  for (const auto& m : modalities)
    for (auto s : samples)
      for (const auto& b : body_parts) kinds.push_back({m, s, b});

  auto candidate = [&](std::size_t kind, std::size_t position) {
    iod::IODeepDescriptor d;
    d.modality = kinds[kind].modality;
    d.samples_per_pixel = kinds[kind].samples;
    d.photometric_interpretation = d.samples_per_pixel == 3 ? "RGB" : "MONOCHROME2";
    d.body_part_examined = kinds[kind].body_part;
    d.dnn_uid = "1.2.826.0.1.3680043.10.1147.99." + std::to_string(kind + 1) + "." + std::to_string(position + 1);
    return d;
  };

  std::uint64_t cases = 0, agree = 0, via_description = 0, via_body_part = 0;
  const std::size_t n = kinds.size();
  std::vector<iod::IODeepDescriptor> list;
  std::function<void(std::size_t)> extend = [&](std::size_t depth) {
    for (const auto& slice : slices) {
      ++cases;
      const auto got = selection::select_network(slice, list).matched_uid;
      const auto want = oracle::select(slice, list);
      if (got == want) ++agree;
      if (want) ++(slice.body_part_examined ? via_body_part : via_description);
    }
    if (depth == 4) return;
    for (std::size_t k = 0; k < n; ++k) {
      list.push_back(candidate(k, depth));
      extend(depth + 1);
      list.pop_back();
    }
  };
  const auto t0 = Clock::now();
  extend(0);
  return {agree == cases && via_description > 0 && via_body_part > 0,
          std::to_string(agree) + "/" + std::to_string(cases) + " cases agree (" + std::to_string(slices.size()) +
              " slices x every list of <= 4 from " + std::to_string(n) + " candidate kinds; " +
              std::to_string(via_body_part) + " body-part and " + std::to_string(via_description) +
              " description matches) in " + fmt(seconds_since(t0)) + " s"};
}

// --- operators -------------------------------------------------------------------

nn::Tensor random_tensor(std::mt19937_64& rng, nn::TensorShape shape) {
  std::normal_distribution<float> d(0.0f, 1.0f);
  nn::Tensor t(std::move(shape));
  for (auto& v : t.data) v = d(rng);
  return t;
}

std::vector<double> as_double(const nn::Tensor& t) { return {t.data.begin(), t.data.end()}; }

Outcome operators() {
  constexpr int kCases = 200;
  constexpr double kTolerance = 1e-5;
  std::mt19937_64 rng(200);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  using nn::TensorShape;
  using U = std::uint32_t;

  std::map<std::string, double> worst{{"conv2d", 0}, {"transposed_conv2d", 0}, {"max_pool2d", 0},
                                      {"upsample_nearest", 0}, {"dense", 0}};
  int shape_failures = 0;
  auto note = [&](const std::string& op, bool shape_ok, double err) {
    if (!shape_ok) ++shape_failures;
    worst[op] = std::max(worst[op], shape_ok ? err : 1e9);
  };

  for (int i = 0; i < kCases; ++i) {
    const int c = pick(1, 4), h = pick(1, 8), w = pick(1, 8), oc = pick(1, 4);
    const int kh = pick(1, h), kw = pick(1, w), sh = pick(1, 3), sw = pick(1, 3);
    const bool same = pick(0, 1) == 1;
    const auto x = random_tensor(rng, TensorShape{U(c), U(h), U(w)});
    const auto weight = random_tensor(rng, TensorShape{U(oc), U(c), U(kh), U(kw)});
    const auto bias = random_tensor(rng, TensorShape{U(oc)});
    const nn::ops::Pair stride{U(sh), U(sw)};

    const auto y = nn::ops::conv2d(x, weight, bias, stride, same ? nn::Padding::Same : nn::Padding::Valid);
    const auto want = oracle::conv2d(oracle::to_grid(x), as_double(weight), as_double(bias), oc, kh, kw, sh, sw, same);
    note("conv2d", y.shape == TensorShape{U(oc), U(want.h), U(want.w)}, oracle::max_relative_error(y.data, want.v));
  }
  for (int i = 0; i < kCases; ++i) {
    const int c = pick(1, 4), h = pick(1, 8), w = pick(1, 8), oc = pick(1, 4);
    const int kh = pick(1, 5), kw = pick(1, 5), sh = pick(1, 3), sw = pick(1, 3);
    const bool same = pick(0, 1) == 1 && kh >= sh && kw >= sw;
    const auto x = random_tensor(rng, TensorShape{U(c), U(h), U(w)});
    const auto weight = random_tensor(rng, TensorShape{U(oc), U(c), U(kh), U(kw)});
    const auto bias = random_tensor(rng, TensorShape{U(oc)});
    const auto y = nn::ops::transposed_conv2d(x, weight, bias, {U(sh), U(sw)},
                                              same ? nn::Padding::Same : nn::Padding::Valid);
    const auto want =
        oracle::transposed_conv2d(oracle::to_grid(x), as_double(weight), as_double(bias), oc, kh, kw, sh, sw, same);
    note("transposed_conv2d", y.shape == TensorShape{U(oc), U(want.h), U(want.w)},
         oracle::max_relative_error(y.data, want.v));
  }
  for (int i = 0; i < kCases; ++i) {
    const int c = pick(1, 4), h = pick(1, 8), w = pick(1, 8);
    const int kh = pick(1, h), kw = pick(1, w), sh = pick(1, 3), sw = pick(1, 3);
    const auto x = random_tensor(rng, TensorShape{U(c), U(h), U(w)});
    const auto y = nn::ops::max_pool2d(x, {U(kh), U(kw)}, {U(sh), U(sw)});
    const auto want = oracle::max_pool2d(oracle::to_grid(x), kh, kw, sh, sw);
    note("max_pool2d", y.shape == TensorShape{U(c), U(want.h), U(want.w)}, oracle::max_relative_error(y.data, want.v));
  }
  for (int i = 0; i < kCases; ++i) {
    const int c = pick(1, 4), h = pick(1, 8), w = pick(1, 8), scale = pick(1, 4);
    const auto x = random_tensor(rng, TensorShape{U(c), U(h), U(w)});
    const auto y = nn::ops::upsample_nearest(x, U(scale));
    const auto want = oracle::upsample(oracle::to_grid(x), scale);
    note("upsample_nearest", y.shape == TensorShape{U(c), U(want.h), U(want.w)},
         oracle::max_relative_error(y.data, want.v));
  }
  for (int i = 0; i < kCases; ++i) {
    const int c = pick(1, 4), h = pick(1, 8), w = pick(1, 8), out = pick(1, 8);
    const auto x = random_tensor(rng, TensorShape{U(c), U(h), U(w)});
    const auto weight = random_tensor(rng, TensorShape{U(out), U(x.size())});
    const auto bias = random_tensor(rng, TensorShape{U(out)});
    const auto y = nn::ops::dense(x, weight, bias);
    note("dense", y.size() == std::size_t(out),
         oracle::max_relative_error(y.data, oracle::dense(as_double(x), as_double(weight), as_double(bias), out)));
  }

  // Shape inference against executed shapes, and against the independent
  // shape oracle.
  constexpr int kNets = 100;
  int nets_ok = 0;
  for (int i = 0; i < kNets; ++i) {
    const auto doc = oracle::random_network(rng);
    try {
      const auto net = nn::parse_architecture(doc);
      const auto inferred = nn::infer_shapes(net);
      const auto model = nn::create_model(net, fixtures::random_weights(net, 300 + i));
      const auto outputs = nn::predict_all(model, random_tensor(rng, net.input_shape));
      const auto expected = oracle::expected_shapes(doc);
      bool ok = expected.has_value();
      for (const auto& [id, t] : outputs) ok = ok && inferred.count(id) && inferred.at(id) == t.shape;
      if (expected) {
        for (const auto& [id, dims] : *expected) {
          const auto it = outputs.find(id);
          ok = ok && it != outputs.end() &&
               std::vector<int>(it->second.shape.dims().begin(), it->second.shape.dims().end()) == dims;
        }
      }
      nets_ok += ok;
    } catch (const std::exception& e) {
      spdlog::error("random net {}: {}", i, e.what());
    }
  }

  double max_err = 0;
  std::string per_op;
  for (const auto& [op, e] : worst) {
    max_err = std::max(max_err, e);
    per_op += (per_op.empty() ? "" : ", ") + op + " " + (e >= 1e9 ? std::string("shape mismatch") : fmt(e * 1e6, 3) + "e-6");
  }
  return {max_err <= kTolerance && shape_failures == 0 && nets_ok == kNets,
          std::to_string(kCases) + " cases per op, worst relative error: " + per_op + " (limit 1e-5); " +
              std::to_string(nets_ok) + "/" + std::to_string(kNets) + " random nets with executed == inferred shapes"};
}

// --- polylines ---------------------------------------------------------------------

Outcome polylines() {
  constexpr int kMasks = 100;
  std::mt19937_64 rng(100);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int masks_ok = 0;
  std::size_t components = 0, worst_excess = 0;
  bool all_ccw = true;
  for (int i = 0; i < kMasks; ++i) {
    synthetic::BlobOptions opt;
    opt.rows = static_cast<std::uint32_t>(pick(24, 64));
    opt.columns = static_cast<std::uint32_t>(pick(24, 64));
    opt.margin = 6;
    opt.min_separation = 12;
    opt.min_sigma = 2.0;
    opt.max_sigma = 5.0;
    opt.max_blobs = 4;
    opt.noise_sigma = 0.08;  // ragged boundaries
    const auto s = synthetic::generate_blobs(5000 + i, opt);
    // Threshold the noisy intensity, not the smooth truth.
    nn::Tensor mask(nn::TensorShape{s.rows, s.columns}, s.intensity);
    rt::ContourOptions copt;
    copt.min_area = 1;
    const auto lines = rt::mask_to_polylines(mask, copt);
    const auto comps = oracle::components(s.intensity, int(s.rows), int(s.columns), 0.5f);
    components += comps.size();
    bool ok = lines.size() == comps.size();
    for (std::size_t k = 0; ok && k < comps.size(); ++k) {
      if (oracle::twice_area(lines[k].points) <= 0) all_ccw = ok = false;
      const auto raster = oracle::rasterize(lines[k].points, int(s.rows), int(s.columns));
      const auto diff = oracle::symmetric_difference(raster, comps[k].pixels);
      if (diff > comps[k].perimeter) {
        ok = false;
        worst_excess = std::max(worst_excess, diff - comps[k].perimeter);
      }
    }
    masks_ok += ok;
  }
  return {masks_ok == kMasks && all_ccw,
          std::to_string(masks_ok) + "/" + std::to_string(kMasks) + " masks (" + std::to_string(components) +
              " components) within perimeter, " + (all_ccw ? "all" : "not all") + " contours CCW" +
              (worst_excess ? ", worst excess " + std::to_string(worst_excess) + " px" : "")};
}

// --- service fixture ------------------------------------------------------------------

struct Service {
  fixtures::TempDir dir;
  pacs::PacsStore store{dir.path()};
  workflow::WorkflowService wf{store};
  pacs::HttpServer server{store, wf, {"127.0.0.1", 0, 16}};
  int port = server.start();
  std::string url = "http://127.0.0.1:" + std::to_string(port);
  pacs::PacsClient client{url};
};

const std::string kCli = IODEEP_CLI;

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

// Packs the toy Unet with the CLI and uploads it; returns the DnnUID.
std::string pack_and_import(const std::string& server_url, const std::filesystem::path& work) {
  const auto nets = fixtures::assets_dir() / "networks";
  const std::string uid = "1.2.826.0.1.3680043.10.1147.100.1";
  std::filesystem::create_directories(work / "net");
  const auto packed = fixtures::run(q(kCli) + " pack --arch " + q(nets / "toy_unet.json") + " --weights " +
                                    q(nets / "toy_unet.iodw") + " --name toy_unet --modality MR --body-part BRAIN" +
                                    " --uid " + uid + " -o " + q(work / "net" / "toy.dcm"));
  if (packed.exit_code != 0) throw std::runtime_error("pack failed");
  const auto imported = fixtures::run(q(kCli) + " import --server " + server_url + " " + q(work / "net"));
  if (imported.exit_code != 0) throw std::runtime_error("import failed");
  return uid;
}

// --- end to end -------------------------------------------------------------------

Outcome end_to_end() {
  constexpr std::uint32_t kSlices = 20;
  constexpr double kBudget = 120.0;
  constexpr double kMinDice = 0.9;
  constexpr double kMinCountAgreement = 0.9;
  const auto t0 = Clock::now();

  Service svc;
  fixtures::TempDir work;
  const auto dnn = pack_and_import(svc.url, work.path());

  // Toy network quality on C++-generated slices, independent of the pipeline.
  const auto net = fixtures::toy_unet();
  const auto model = nn::create_model(nn::parse_architecture(net.architecture), nn::decode_weights(net.weights));
  const auto held_out = synthetic::generate_series(424242, 100);
  double dice_sum = 0;
  for (std::size_t i = 0; i < held_out.images.size(); ++i) {
    const auto slice = iod::pixel_slice_of(held_out.images[i]);
    const auto plan = nn::check_tensor_shape(slice.meta, model.descriptor().input_shape);
    const auto out = nn::predict(model, nn::preprocess(slice, plan));
    std::vector<std::uint8_t> mask(out.data.size());
    for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = out.data[k] >= 0.5f;
    dice_sum += synthetic::dice(mask, held_out.slices[i].truth);
  }
  const double dice = dice_sum / double(held_out.images.size());

  const auto series = synthetic::generate_series(2026, kSlices);
  for (const auto& img : series.images) svc.client.store_instance(fixtures::file_bytes(img));

  int frame_ok = 0, count_ok = 0, approval_ok = 0, right_net = 0;
  for (std::uint32_t i = 0; i < kSlices; ++i) {
    const auto& img = series.images[i];
    const auto uid = *img.text(tags::SOPInstanceUID);
    const auto frame = *img.text(tags::FrameOfReferenceUID);
    try {
      const auto result = svc.client.predict(uid);
      right_net += result.dnn_uid == dnn;
      if (result.proposals.empty()) continue;
      const auto rs_uid = svc.client.submit(
          {result.session_id, std::vector(result.proposals.size(), rt::Decision::Accepted), "DOE^JANE"});
      const auto rs = dicom::decode_file(svc.client.retrieve_instance(rs_uid)).body;
      const auto* refs = rs.items(tags::ReferencedFrameOfReferenceSequence);
      frame_ok += rs.text(tags::FrameOfReferenceUID) == frame && refs && refs->size() == 1 &&
                  refs->front().text(tags::FrameOfReferenceUID) == frame;
      const auto* rois = rs.items(tags::ROIContourSequence);
      count_ok += rois && rois->size() == series.slices[i].blobs.size();
      approval_ok += rs.text(tags::ApprovalStatus) == "APPROVED" && rs.text(tags::ReviewerName) == "DOE^JANE" &&
                     rs.text_or_empty(tags::ReviewDate).size() == 8 && rs.text_or_empty(tags::ReviewTime).size() >= 6;
    } catch (const Error& e) {
      spdlog::error("slice {}: {}", uid, e.what());
    }
  }
  const double t = seconds_since(t0);
  const double agreement = double(count_ok) / kSlices;
  return {dice >= kMinDice && right_net == int(kSlices) && frame_ok == int(kSlices) && agreement >= kMinCountAgreement &&
              approval_ok == int(kSlices) && t < kBudget,
          "toy Unet Dice " + fmt(dice, 4) + " on 100 held-out slices (min " + fmt(kMinDice, 1) + "); " +
              std::to_string(frame_ok) + "/" + std::to_string(kSlices) + " frame UIDs match, ROI count = blob count on " +
              std::to_string(count_ok) + "/" + std::to_string(kSlices) + " (min 90%), approval filled on " +
              std::to_string(approval_ok) + "/" + std::to_string(kSlices) + "; " + fmt(t, 1) + " s (limit " +
              fmt(kBudget, 0) + " s)"};
}

// --- negative path ----------------------------------------------------------------

Outcome negative_path() {
  Service svc;
  fixtures::TempDir work;
  pack_and_import(svc.url, work.path());
  synthetic::SeriesOptions ct;
  ct.modality = "CT";
  ct.body_part = "BRAIN";
  const auto img = synthetic::generate_series(31, 1, ct).images[0];
  const auto uid = svc.client.store_instance(fixtures::file_bytes(img));

  httplib::Client http("127.0.0.1", svc.port);
  const auto res = http.Post(("/v1/predict/" + uid).c_str(), "", "application/json");
  int status = res ? res->status : -1;
  std::string error;
  if (res) {
    try {
      error = json::parse(res->body).at("error").get<std::string>();
    } catch (const std::exception&) {
    }
  }
  const int exit_code = fixtures::run(q(kCli) + " predict --server " + svc.url + " --slice " + uid).exit_code;
  return {status == 422 && error == "NoMatchingNetwork" && exit_code == 3,
          "API status " + std::to_string(status) + " " + error + ", CLI exit " + std::to_string(exit_code) +
              " (want 422 NoMatchingNetwork, exit 3)"};
}

// --- concurrency ------------------------------------------------------------------

Outcome concurrency() {
  constexpr int kParallel = 16;
  Service svc;
  fixtures::TempDir work;
  pack_and_import(svc.url, work.path());
  const auto seeded = synthetic::generate_series(77, 4);
  std::vector<std::string> slices;
  for (const auto& img : seeded.images) slices.push_back(svc.client.store_instance(fixtures::file_bytes(img)));

  // Sequential reference proposals per slice.
  std::vector<std::vector<rt::RoiPolyline>> reference;
  for (const auto& uid : slices) {
    std::vector<rt::RoiPolyline> lines;
    for (const auto& p : svc.client.predict(uid).proposals) lines.push_back(p.polyline);
    reference.push_back(std::move(lines));
  }

  const auto fresh = synthetic::generate_series(78, kParallel);
  const auto records_before = svc.store.records().size();
  std::atomic<int> stored{0}, deterministic{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < kParallel; ++t) {
    threads.emplace_back([&, t] {
      try {
        svc.client.store_instance(fixtures::file_bytes(fresh.images[t]));
        ++stored;
      } catch (const std::exception& e) {
        spdlog::error("store {}: {}", t, e.what());
      }
    });
    threads.emplace_back([&, t] {
      try {
        const auto k = std::size_t(t) % slices.size();
        const auto result = svc.client.predict(slices[k]);
        std::vector<rt::RoiPolyline> lines;
        for (const auto& p : result.proposals) lines.push_back(p.polyline);
        deterministic += lines == reference[k];
      } catch (const std::exception& e) {
        spdlog::error("predict {}: {}", t, e.what());
      }
    });
  }
  for (auto& th : threads) th.join();

  std::size_t indexed = 0;
  for (const auto& img : fresh.images) indexed += svc.store.record(*img.text(tags::SOPInstanceUID)).has_value();
  const auto after = svc.store.records().size();
  // The journal on disk must hold the same records.
  const bool journal_ok = pacs::PacsStore(svc.dir.path()).records() == svc.store.records();
  return {stored == kParallel && indexed == std::size_t(kParallel) && after == records_before + kParallel &&
              deterministic == kParallel && journal_ok,
          std::to_string(stored) + "/" + std::to_string(kParallel) + " parallel stores, " + std::to_string(indexed) +
              " indexed (" + std::to_string(after - records_before) + " new records" +
              (journal_ok ? ", journal consistent" : ", journal differs") + "), " + std::to_string(deterministic) +
              "/" + std::to_string(kParallel) + " parallel predictions equal the sequential ones"};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"codec soundness", codec},
      {"selection oracle equivalence", selection_table},
      {"operator oracle equivalence", operators},
      {"polyline fidelity", polylines},
      {"end-to-end workflow", end_to_end},
      {"negative path", negative_path},
      {"concurrency", concurrency},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
