#include "iodeep/workflow.hpp"

#include <algorithm>
#include <random>

#include <spdlog/spdlog.h>

#include "iodeep/dicom/file.hpp"
#include "iodeep/dicom/tags.hpp"
#include "iodeep/error.hpp"
#include "iodeep/iod/iodeep.hpp"
#include "iodeep/iod/slice.hpp"
#include "iodeep/nn/model.hpp"
#include "iodeep/nn/preprocess.hpp"
#include "iodeep/selection.hpp"

namespace iodeep::workflow {

namespace tags = dicom::tags;

namespace {

std::string new_session_id() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (int part = 0; part < 2; ++part) {
    auto v = rng();
    for (int i = 0; i < 16; ++i, v >>= 4) id.push_back(kHex[v & 0xF]);
  }
  return id;
}

/// Foreground probability plane of a mask head: the only channel, or the
/// last one of a softmax over classes.
nn::Tensor mask_plane(const nn::Tensor& output) {
  if (output.shape.rank() == 2) return nn::Tensor(nn::TensorShape{1, output.shape[0], output.shape[1]}, output.data);
  if (output.shape.rank() != 3) {
    throw Error(Errc::ShapeMismatch, "network output " + output.shape.str() + " is not a mask");
  }
  const std::size_t plane = std::size_t{output.shape.height()} * output.shape.width();
  std::vector<float> data(output.data.end() - static_cast<std::ptrdiff_t>(plane), output.data.end());
  return nn::Tensor(nn::TensorShape{1, output.shape.height(), output.shape.width()}, std::move(data));
}

/// Runs one pipeline step, labelling any failure with the step's name.
template <class F>
auto run_stage(const std::function<void(std::string_view)>& hook, std::string_view name, F&& body)
    -> decltype(body()) {
  try {
    if (hook) hook(name);
    return body();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw Error(e.code(), e.what(), std::string(name));
  } catch (const std::exception& e) {
    throw Error(Errc::InvalidState, e.what(), std::string(name));
  }
}

}  // namespace

std::string_view status_name(ProposalStatus status) {
  switch (status) {
    case ProposalStatus::Proposed: return "proposed";
    case ProposalStatus::Accepted: return "accepted";
    case ProposalStatus::Rejected: return "rejected";
  }
  return "proposed";
}

WorkflowService::WorkflowService(pacs::Repository& repository, WorkflowOptions options)
    : repo_(repository), options_(std::move(options)) {}

PredictionResult WorkflowService::run_roi_prediction(std::string_view slice_uid) {
  auto stage = [this](std::string_view name, auto&& body) {
    return run_stage(options_.stage_hook, name, body);
  };

  const auto slice = stage(stage::kSlice, [&] {
    return dicom::decode_file(repo_.retrieve_instance(slice_uid)).body;
  });

  struct SliceInfo {
    iod::SliceTagSet tags;
    iod::PixelMeta pixel;
    std::string frame;
  };
  const auto info = stage(stage::kTags, [&] {
    SliceInfo s{iod::slice_tags_of(slice), iod::pixel_meta_of(slice), slice.text_or_empty(tags::FrameOfReferenceUID)};
    if (s.frame.empty()) throw Error(Errc::MissingTag, "slice lacks FrameOfReferenceUID");
    return s;
  });

  const auto candidates = stage(stage::kQuery, [&] {
    const auto found = repo_.query(pacs::Level::Instance,
                                   {{"SOPClassUID", std::string(iod::kIODeepSOPClassUID)}});
    std::vector<iod::IODeepDescriptor> out;
    for (const auto& summary : found) {
      try {
        out.push_back(iod::parse_iodeep(dicom::decode_file(repo_.retrieve_instance(summary.uid)).body));
      } catch (const Error& e) {
        spdlog::warn("ignoring IODeep instance {}: {}", summary.uid, e.what());
      }
    }
    return out;
  });

  const auto chosen_uid = stage(stage::kSelection, [&] {
    const auto result = selection::select_network(info.tags, candidates);
    if (!result.matched_uid) {
      std::string third = info.tags.body_part_examined ? "body part '" + *info.tags.body_part_examined + "'"
                          : info.tags.study_description
                              ? "study description '" + *info.tags.study_description + "'"
                              : std::string("no body part or study description");
      throw Error(Errc::NoMatchingNetwork,
                  "no IODeep instance among " + std::to_string(candidates.size()) + " fits modality '" +
                      info.tags.modality + "', " + std::to_string(info.tags.samples_per_pixel) +
                      " sample(s) per pixel, " + third);
    }
    return *result.matched_uid;
  });

  const auto desc = stage(stage::kRetrieve, [&] {
    auto it = std::find_if(candidates.begin(), candidates.end(),
                           [&](const auto& c) { return c.dnn_uid == chosen_uid; });
    if (it == candidates.end()) throw Error(Errc::NotFound, "selected network vanished");
    return *it;
  });

  auto weights = stage(stage::kWeights, [&] {
    if (const auto uid = pacs::weights_locator_uid(desc.dnn_weights)) {
      return nn::decode_weights(repo_.retrieve_weights(*uid));
    }
    return nn::load_weights(desc.dnn_weights);
  });

  auto net = stage(stage::kParse, [&] { return nn::parse_architecture(desc.dnn_architecture); });
  const auto plan = stage(stage::kShapeCheck, [&] { return nn::check_tensor_shape(info.pixel, net.input_shape); });
  const auto model = stage(stage::kCreateModel, [&] { return nn::create_model(std::move(net), std::move(weights)); });
  const auto input = stage(stage::kPreprocess, [&] { return nn::preprocess(iod::pixel_slice_of(slice), plan); });
  const auto output = stage(stage::kPredict, [&] { return nn::predict(model, input); });

  auto proposals = stage(stage::kPolylines, [&] {
    auto mask = mask_plane(output);
    if (mask.shape.height() != info.pixel.rows || mask.shape.width() != info.pixel.columns) {
      mask = nn::resize_nearest(mask, info.pixel.rows, info.pixel.columns);
    }
    auto contour = options_.contour;
    contour.native_rows.reset();
    contour.native_columns.reset();
    contour.slice_ref_uid = info.frame;
    std::vector<RoiProposal> out;
    for (auto& polyline : rt::mask_to_polylines(mask, contour)) {
      RoiProposal p;
      p.id = "p" + std::to_string(out.size());
      p.slice_ref_uid = info.frame;
      p.confidence = rt::mean_inside(mask, polyline.points);
      p.polyline = std::move(polyline);
      out.push_back(std::move(p));
    }
    return out;
  });

  PredictionResult result;
  result.session_id = new_session_id();
  result.slice_uid = std::string(slice_uid);
  result.frame_of_reference_uid = info.frame;
  result.dnn_uid = desc.dnn_uid;
  result.dnn_name = desc.dnn_name;
  result.proposals = std::move(proposals);
  spdlog::info("slice {} predicted with DnnUID {} ({} proposal(s), session {})", result.slice_uid,
               result.dnn_uid, result.proposals.size(), result.session_id);

  std::lock_guard lock(mutex_);
  sessions_.emplace(result.session_id, Session{result, false, {}});
  session_order_.push_back(result.session_id);
  while (session_order_.size() > options_.max_sessions) {
    sessions_.erase(session_order_.front());
    session_order_.erase(session_order_.begin());
  }
  return result;
}

std::string WorkflowService::submit_validation(std::string_view session_id,
                                               const std::vector<rt::Decision>& decisions,
                                               std::string_view reviewer_name) {
  PredictionResult snapshot;
  {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(Errc::NotFound, "no prediction session " + std::string(session_id));
    auto& s = it->second;
    if (s.validated) throw Error(Errc::InvalidState, "session " + std::string(session_id) + " was already validated");
    if (decisions.size() != s.result.proposals.size()) {
      throw Error(Errc::InvalidRequest, std::to_string(decisions.size()) + " decision(s) for " +
                                            std::to_string(s.result.proposals.size()) + " proposal(s)");
    }
    if (reviewer_name.empty()) throw Error(Errc::InvalidRequest, "reviewer name is required");
    if (std::none_of(decisions.begin(), decisions.end(), [](auto d) { return d == rt::Decision::Accepted; })) {
      throw Error(Errc::EmptyRoiSet, "every proposal was rejected; nothing to store");
    }
    // Claim the session so a concurrent submit cannot store twice.
    s.validated = true;
    snapshot = s.result;
  }

  auto release = [&] {
    std::lock_guard lock(mutex_);
    if (auto it = sessions_.find(session_id); it != sessions_.end()) it->second.validated = false;
  };

  std::string uid;
  try {
    std::vector<rt::RoiPolyline> accepted;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
      if (decisions[i] == rt::Decision::Accepted) accepted.push_back(snapshot.proposals[i].polyline);
    }
    const auto source = dicom::decode_file(repo_.retrieve_instance(snapshot.slice_uid)).body;
    rt::ValidationRecord review;
    review.decisions = decisions;
    review.reviewer_name = std::string(reviewer_name);
    std::tie(review.review_date, review.review_time) = rt::now_da_tm();
    const auto bytes = run_stage(options_.stage_hook, stage::kBuild, [&] {
      return dicom::encode_file(dicom::DicomFile::from_body(rt::build_rtstruct(accepted, source, review)));
    });
    uid = run_stage(options_.stage_hook, stage::kStore, [&] {
      try {
        return repo_.store_instance(bytes);
      } catch (const Error& e) {
        throw Error(Errc::StoreFailure, std::string("storing the structure set failed: ") + e.what());
      }
    });
  } catch (...) {
    release();
    throw;
  }

  std::lock_guard lock(mutex_);
  if (auto it = sessions_.find(session_id); it != sessions_.end()) {
    auto& s = it->second;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
      s.result.proposals[i].status =
          decisions[i] == rt::Decision::Accepted ? ProposalStatus::Accepted : ProposalStatus::Rejected;
    }
    s.rtstruct_uid = uid;
  }
  spdlog::info("session {} validated by {}: structure set {}", session_id, reviewer_name, uid);
  return uid;
}

std::optional<PredictionResult> WorkflowService::session(std::string_view session_id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second.result;
}

}  // namespace iodeep::workflow
