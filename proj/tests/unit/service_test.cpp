#include <algorithm>
#include <atomic>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "iodeep/dicom/file.hpp"
#include "iodeep/dicom/tags.hpp"
#include "iodeep/error.hpp"
#include "iodeep/iod/iodeep.hpp"
#include "iodeep/pacs/client.hpp"
#include "iodeep/pacs/server.hpp"
#include "iodeep/rt/rtstruct.hpp"
#include "iodeep/synthetic.hpp"

using namespace iodeep;
using json = nlohmann::json;
using pacs::Level;

namespace {

constexpr const char* kDnn = "1.2.826.0.1.3680043.10.1147.7.1";

// A live server over a temporary store, on a free port.
class Service : public ::testing::Test {
 protected:
  fixtures::TempDir dir;
  pacs::PacsStore store{dir.path()};
  workflow::WorkflowService wf{store};
  pacs::HttpServer server{store, wf, {"127.0.0.1", 0, 4}};
  int port = server.start();
  std::string url = "http://127.0.0.1:" + std::to_string(port);
  pacs::PacsClient client{url};
  httplib::Client http{"127.0.0.1", port};

  synthetic::SyntheticSeries upload(std::uint64_t seed, std::uint32_t count, synthetic::SeriesOptions opt = {}) {
    auto series = synthetic::generate_series(seed, count, opt);
    for (const auto& img : series.images) client.store_instance(fixtures::file_bytes(img));
    return series;
  }

  static std::string uid_of(const dicom::DataSet& ds) { return *ds.text(dicom::tags::SOPInstanceUID); }
};

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no iodeep::Error thrown";
  return Errc::InvalidState;
}

}  // namespace

TEST_F(Service, Health) {
  EXPECT_TRUE(client.healthy());
  EXPECT_FALSE(pacs::PacsClient("http://127.0.0.1:1").healthy());
}

TEST_F(Service, StoreQueryRetrieveThroughTheApi) {
  const auto series = upload(1, 3);
  EXPECT_EQ(store.records().size(), 3u);
  const auto studies = client.query(Level::Study, {});
  ASSERT_EQ(studies.size(), 1u);
  EXPECT_EQ(studies[0], store.query(Level::Study, {})[0]);
  EXPECT_EQ(client.query(Level::Instance, {{"Modality", "MR"}}), store.query(Level::Instance, {{"Modality", "MR"}}));
  EXPECT_EQ(client.retrieve_instance(uid_of(series.images[1])), fixtures::file_bytes(series.images[1]));

  const auto study = studies[0].uid;
  auto res = http.Get(("/v1/studies/" + study + "/series").c_str());
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body).size(), 1u);
  const auto series_uid = *series.images[0].text(dicom::tags::SeriesInstanceUID);
  res = http.Get(("/v1/series/" + series_uid + "/instances").c_str());
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body).size(), 3u);
  res = http.Get(("/v1/instances/" + uid_of(series.images[0])).c_str());
  ASSERT_TRUE(res);
  EXPECT_EQ(res->get_header_value("Content-Type"), "application/dicom");
}

TEST_F(Service, ErrorsCarryCodeMessageAndStage) {
  auto res = http.Get("/v1/instances/1.2.3.4");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  const auto body = json::parse(res->body);
  EXPECT_EQ(body.at("error"), "NotFound");
  EXPECT_TRUE(body.at("message").is_string());
  EXPECT_EQ(code_of([&] { client.retrieve_instance("1.2.3.4"); }), Errc::NotFound);

  res = http.Get("/v1/instances?PatientName=X");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body).at("error"), "UnindexedTagFilter");

  res = http.Post("/v1/instances", std::string(10, 'x'), "application/dicom");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body).at("error"), "NotDicom");
}

TEST_F(Service, MetadataIsDicomJson) {
  const auto series = upload(2, 1);
  const auto meta = json::parse(client.metadata_json(uid_of(series.images[0])));
  EXPECT_EQ(meta.at("00080060").at("vr"), "CS");
  EXPECT_EQ(meta.at("00080060").at("Value").at(0), "MR");
  EXPECT_EQ(meta.at("00100010").at("vr"), "PN");
  EXPECT_FALSE(meta.contains("7FE00010"));
}

TEST_F(Service, RenderedSliceIsPng) {
  const auto series = upload(3, 1);
  const auto path = "/v1/instances/" + uid_of(series.images[0]) + "/rendered";
  auto res = http.Get(path.c_str());
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "image/png");
  const std::string magic("\x89PNG\r\n\x1a\n", 8);
  EXPECT_EQ(res->body.substr(0, 8), magic);
  auto windowed = http.Get((path + "?center=100&width=50").c_str());
  ASSERT_TRUE(windowed);
  EXPECT_EQ(windowed->status, 200);
  EXPECT_NE(windowed->body, res->body);
  auto half = http.Get((path + "?center=100").c_str());
  ASSERT_TRUE(half);
  EXPECT_EQ(half->status, 400);
}

TEST_F(Service, WeightsRoundTrip) {
  const auto net = fixtures::toy_unet();
  client.store_weights(kDnn, net.weights);
  EXPECT_EQ(client.retrieve_weights(kDnn), net.weights);
  EXPECT_EQ(store.retrieve_weights(kDnn), net.weights);
  EXPECT_EQ(code_of([&] { client.retrieve_weights("1.2.3.5"); }), Errc::NotFound);
}

TEST_F(Service, PredictAndSubmitOverHttp) {
  fixtures::seed_network(client, fixtures::toy_unet(), kDnn, "MR", "BRAIN");
  const auto series = upload(4, 2);
  const auto slice = uid_of(series.images[0]);
  const auto result = client.predict(slice);
  EXPECT_EQ(result.dnn_uid, kDnn);
  EXPECT_EQ(result.frame_of_reference_uid, series.images[0].text(dicom::tags::FrameOfReferenceUID));
  ASSERT_FALSE(result.proposals.empty());
  // The remote and local pipelines agree.
  const auto local = workflow::WorkflowService(store).run_roi_prediction(slice);
  ASSERT_EQ(local.proposals.size(), result.proposals.size());
  for (std::size_t i = 0; i < local.proposals.size(); ++i) {
    EXPECT_EQ(local.proposals[i].polyline, result.proposals[i].polyline);
  }

  pacs::wire::ValidationRequest req{result.session_id,
                              std::vector(result.proposals.size(), rt::Decision::Accepted), "DOE^JANE"};
  const auto rs_uid = client.submit(req);
  const auto rs = store.dataset(rs_uid);
  EXPECT_EQ(rs.text(dicom::tags::ReviewerName), "DOE^JANE");
  EXPECT_EQ(rs.text(dicom::tags::FrameOfReferenceUID), result.frame_of_reference_uid);
  EXPECT_EQ(code_of([&] { client.submit(req); }), Errc::InvalidState);

  auto res = http.Post("/v1/rtstruct", R"({"session":"x"})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body).at("error"), "InvalidRequest");
}

TEST_F(Service, NoMatchingNetworkIs422) {
  fixtures::seed_network(client, fixtures::toy_unet(), kDnn, "MR", "BRAIN");
  synthetic::SeriesOptions ct;
  ct.modality = "CT";
  const auto series = upload(5, 1, ct);
  auto res = http.Post(("/v1/predict/" + uid_of(series.images[0])).c_str(), "", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 422);
  const auto body = json::parse(res->body);
  EXPECT_EQ(body.at("error"), "NoMatchingNetwork");
  EXPECT_EQ(body.at("stage"), "selection");
  try {
    client.predict(uid_of(series.images[0]));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoMatchingNetwork);
    EXPECT_EQ(e.stage(), "selection");
  }
}

TEST_F(Service, WorkflowRunsAgainstTheClient) {
  fixtures::seed_network(client, fixtures::toy_unet(), kDnn, "MR", "BRAIN");
  const auto series = upload(6, 1);
  workflow::WorkflowService remote(client);
  const auto result = remote.run_roi_prediction(uid_of(series.images[0]));
  EXPECT_EQ(result.proposals.size(),
            workflow::WorkflowService(store).run_roi_prediction(uid_of(series.images[0])).proposals.size());
  ASSERT_FALSE(result.proposals.empty());
  const auto before = store.revision();
  remote.submit_validation(result.session_id, std::vector(result.proposals.size(), rt::Decision::Accepted), "X^Y");
  EXPECT_EQ(store.revision(), before + 1);
}

TEST_F(Service, BurstOfUploadsIsNotDropped) {
  const auto series = synthetic::generate_series(7, 48);
  std::atomic<int> ok{0};
  std::vector<std::thread> threads;
  for (const auto& img : series.images) {
    threads.emplace_back([&, bytes = fixtures::file_bytes(img)] {
      try {
        client.store_instance(bytes);
        ++ok;
      } catch (const Error&) {
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok, 48);
  EXPECT_EQ(store.records().size(), 48u);
}

TEST(ServiceClient, UnreachableServerIsConnectionFailure) {
  pacs::PacsClient client("127.0.0.1:1");
  EXPECT_EQ(code_of([&] { client.query(Level::Study, {}); }), Errc::ConnectionFailure);
}

TEST(ServiceBind, ParsesHostAndPort) {
  EXPECT_EQ(pacs::parse_bind("0.0.0.0:9000").host, "0.0.0.0");
  EXPECT_EQ(pacs::parse_bind("0.0.0.0:9000").port, 9000);
  EXPECT_EQ(pacs::parse_bind("7000").host, "127.0.0.1");
  EXPECT_EQ(code_of([] { pacs::parse_bind("host:http"); }), Errc::InvalidRequest);
}
