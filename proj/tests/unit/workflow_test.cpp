#include <algorithm>
#include <stdexcept>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "iodeep/dicom/tags.hpp"
#include "iodeep/error.hpp"
#include "iodeep/pacs/store.hpp"
#include "iodeep/rt/rtstruct.hpp"
#include "iodeep/synthetic.hpp"
#include "iodeep/workflow.hpp"

using namespace iodeep;
using workflow::WorkflowService;

namespace {

constexpr const char* kDnn = "1.2.826.0.1.3680043.10.1147.6.1";

struct Seeded {
  fixtures::TempDir dir;
  pacs::PacsStore store{dir.path()};
  synthetic::SyntheticSeries series;
  std::vector<std::string> slice_uids;

  explicit Seeded(std::uint32_t count = 4, synthetic::SeriesOptions opt = {}) {
    fixtures::seed_network(store, fixtures::toy_unet(), kDnn, "MR", "BRAIN");
    series = synthetic::generate_series(77, count, opt);
    for (const auto& img : series.images) slice_uids.push_back(store.store_instance(fixtures::file_bytes(img)));
  }
};

// Slice with several blobs so that there is more than one proposal.
std::size_t with_two_or_more(const Seeded& s) {
  for (std::size_t i = 0; i < s.series.slices.size(); ++i) {
    if (s.series.slices[i].blobs.size() >= 2) return i;
  }
  return s.series.slices.size();
}

constexpr std::string_view kStages[] = {
    workflow::stage::kSlice,     workflow::stage::kTags,        workflow::stage::kQuery,
    workflow::stage::kSelection, workflow::stage::kRetrieve,    workflow::stage::kWeights,
    workflow::stage::kParse,     workflow::stage::kShapeCheck,  workflow::stage::kCreateModel,
    workflow::stage::kPreprocess, workflow::stage::kPredict,    workflow::stage::kPolylines,
};

}  // namespace

TEST(Workflow, ProposalsReferenceTheSliceFrame) {
  Seeded s;
  WorkflowService wf(s.store);
  const auto result = wf.run_roi_prediction(s.slice_uids[0]);
  EXPECT_EQ(result.dnn_uid, kDnn);
  EXPECT_EQ(result.dnn_name, "toy_unet");
  EXPECT_EQ(result.frame_of_reference_uid, s.series.images[0].text(dicom::tags::FrameOfReferenceUID));
  EXPECT_FALSE(result.proposals.empty());
  for (const auto& p : result.proposals) {
    EXPECT_EQ(p.slice_ref_uid, result.frame_of_reference_uid);
    EXPECT_EQ(p.polyline.slice_ref_uid, result.frame_of_reference_uid);
    EXPECT_EQ(p.status, workflow::ProposalStatus::Proposed);
    EXPECT_GT(p.confidence, 0.5);
    EXPECT_LE(p.confidence, 1.0);
  }
}

TEST(Workflow, NoCandidateIsNoMatchingNetworkAtSelection) {
  synthetic::SeriesOptions ct;
  ct.modality = "CT";
  Seeded s(1, ct);
  WorkflowService wf(s.store);
  try {
    wf.run_roi_prediction(s.slice_uids[0]);
    FAIL() << "expected NoMatchingNetwork";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoMatchingNetwork);
    EXPECT_EQ(e.stage(), workflow::stage::kSelection);
  }
}

TEST(Workflow, UnknownSliceFailsAtSliceStage) {
  Seeded s(1);
  WorkflowService wf(s.store);
  try {
    wf.run_roi_prediction("1.2.3.4.5.6");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotFound);
    EXPECT_EQ(e.stage(), workflow::stage::kSlice);
  }
}

TEST(Workflow, InjectedFailureIsReportedAtItsStage) {
  Seeded s(1);
  for (const auto stage : kStages) {
    workflow::WorkflowOptions opt;
    opt.stage_hook = [stage](std::string_view at) {
      if (at == stage) throw std::runtime_error("injected");
    };
    WorkflowService wf(s.store, opt);
    const auto rev = s.store.revision();
    try {
      wf.run_roi_prediction(s.slice_uids[0]);
      ADD_FAILURE() << "no failure at " << stage;
    } catch (const Error& e) {
      EXPECT_EQ(e.stage(), stage);
    }
    EXPECT_EQ(s.store.revision(), rev) << stage;
  }
}

TEST(Workflow, InjectedFailureAtBuildOrStoreStoresNothing) {
  Seeded s(1);
  for (const auto stage : {workflow::stage::kBuild, workflow::stage::kStore}) {
    workflow::WorkflowOptions opt;
    opt.stage_hook = [stage](std::string_view at) {
      if (at == stage) throw std::runtime_error("injected");
    };
    WorkflowService wf(s.store, opt);
    const auto result = wf.run_roi_prediction(s.slice_uids[0]);
    ASSERT_FALSE(result.proposals.empty());
    const auto rev = s.store.revision();
    std::vector<rt::Decision> all(result.proposals.size(), rt::Decision::Accepted);
    try {
      wf.submit_validation(result.session_id, all, "DOE^JANE");
      ADD_FAILURE() << "no failure at " << stage;
    } catch (const Error& e) {
      EXPECT_EQ(e.stage(), stage);
    }
    EXPECT_EQ(s.store.revision(), rev);
  }
}

TEST(Workflow, AllZeroSliceHasNoProposals) {
  fixtures::TempDir dir;
  pacs::PacsStore store(dir.path());
  fixtures::seed_network(store, fixtures::toy_unet(), kDnn, "MR", "BRAIN");
  auto img = synthetic::generate_series(5, 1).images[0];
  img.set_bytes(dicom::tags::PixelData, dicom::VR::OW, std::vector<std::uint8_t>(64 * 64 * 2, 0));
  const auto uid = store.store_instance(fixtures::file_bytes(img));
  WorkflowService wf(store);
  EXPECT_TRUE(wf.run_roi_prediction(uid).proposals.empty());
}

TEST(Workflow, SameSliceGivesSameProposals) {
  Seeded s(2);
  WorkflowService wf(s.store);
  const auto a = wf.run_roi_prediction(s.slice_uids[1]);
  const auto b = wf.run_roi_prediction(s.slice_uids[1]);
  EXPECT_NE(a.session_id, b.session_id);
  ASSERT_EQ(a.proposals.size(), b.proposals.size());
  for (std::size_t i = 0; i < a.proposals.size(); ++i) {
    EXPECT_EQ(a.proposals[i].polyline, b.proposals[i].polyline);
    EXPECT_EQ(a.proposals[i].confidence, b.proposals[i].confidence);
  }
  EXPECT_EQ(WorkflowService(s.store).run_roi_prediction(s.slice_uids[1]).proposals.size(), a.proposals.size());
}

TEST(Workflow, OneOfTwoAcceptedGivesOneContour) {
  Seeded s(8);
  const auto i = with_two_or_more(s);
  ASSERT_LT(i, s.slice_uids.size()) << "generator produced no multi-blob slice";
  WorkflowService wf(s.store);
  const auto result = wf.run_roi_prediction(s.slice_uids[i]);
  ASSERT_GE(result.proposals.size(), 2u);
  std::vector<rt::Decision> d(result.proposals.size(), rt::Decision::Rejected);
  d[1] = rt::Decision::Accepted;
  const auto rs_uid = wf.submit_validation(result.session_id, d, "DOE^JANE");
  const auto rs = s.store.dataset(rs_uid);
  ASSERT_EQ(rs.items(dicom::tags::ROIContourSequence)->size(), 1u);
  const auto back = rt::extract_polylines(rs);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].points, result.proposals[1].polyline.points);
  EXPECT_EQ(rs.text(dicom::tags::ReviewerName), "DOE^JANE");

  const auto after = wf.session(result.session_id);
  ASSERT_TRUE(after);
  EXPECT_EQ(after->proposals[0].status, workflow::ProposalStatus::Rejected);
  EXPECT_EQ(after->proposals[1].status, workflow::ProposalStatus::Accepted);
}

TEST(Workflow, AcceptedSetRoundTrips) {
  Seeded s(3);
  WorkflowService wf(s.store);
  const auto result = wf.run_roi_prediction(s.slice_uids[2]);
  ASSERT_FALSE(result.proposals.empty());
  const auto rs_uid = wf.submit_validation(
      result.session_id, std::vector(result.proposals.size(), rt::Decision::Accepted), "DOE^JANE");
  std::vector<rt::RoiPolyline> accepted;
  for (const auto& p : result.proposals) accepted.push_back(p.polyline);
  EXPECT_EQ(rt::extract_polylines(s.store.dataset(rs_uid)), accepted);
}

TEST(Workflow, SubmitRules) {
  Seeded s(1);
  WorkflowService wf(s.store);
  const auto result = wf.run_roi_prediction(s.slice_uids[0]);
  const auto n = result.proposals.size();
  ASSERT_GT(n, 0u);
  const auto rev = s.store.revision();

  auto code = [&](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidState;
  };
  EXPECT_EQ(code([&] { wf.submit_validation("nope", {}, "X"); }), Errc::NotFound);
  EXPECT_EQ(code([&] { wf.submit_validation(result.session_id, std::vector(n + 1, rt::Decision::Accepted), "X"); }),
            Errc::InvalidRequest);
  EXPECT_EQ(code([&] { wf.submit_validation(result.session_id, std::vector(n, rt::Decision::Rejected), "X"); }),
            Errc::EmptyRoiSet);
  EXPECT_EQ(s.store.revision(), rev);

  wf.submit_validation(result.session_id, std::vector(n, rt::Decision::Accepted), "X");
  EXPECT_EQ(code([&] { wf.submit_validation(result.session_id, std::vector(n, rt::Decision::Accepted), "X"); }),
            Errc::InvalidState);
  EXPECT_EQ(s.store.revision(), rev + 1);
}

TEST(Workflow, OldSessionsAreDropped) {
  Seeded s(1);
  workflow::WorkflowOptions opt;
  opt.max_sessions = 2;
  WorkflowService wf(s.store, opt);
  const auto first = wf.run_roi_prediction(s.slice_uids[0]).session_id;
  wf.run_roi_prediction(s.slice_uids[0]);
  EXPECT_TRUE(wf.session(first));
  wf.run_roi_prediction(s.slice_uids[0]);
  EXPECT_FALSE(wf.session(first));
}
