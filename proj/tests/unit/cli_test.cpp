#include <algorithm>
#include <filesystem>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "iodeep/dicom/file.hpp"
#include "iodeep/dicom/tags.hpp"
#include "iodeep/iod/iodeep.hpp"
#include "iodeep/iod/slice.hpp"
#include "iodeep/nn/weights.hpp"
#include "iodeep/pacs/client.hpp"
#include "iodeep/selection.hpp"

using namespace iodeep;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = IODEEP_CLI;

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

fixtures::RunResult cli(const std::string& args) { return fixtures::run(q(kCli) + " " + args); }

std::string pack_toy(const fs::path& out, const std::string& uid, const std::string& extra = "") {
  const auto nets = fixtures::assets_dir() / "networks";
  return "pack --arch " + q(nets / "toy_unet.json") + " --weights " + q(nets / "toy_unet.iodw") +
         " --name toy_unet --modality MR --body-part BRAIN --uid " + uid + " -o " + q(out) + " " + extra;
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli("").exit_code, 2);
  EXPECT_EQ(cli("frobnicate").exit_code, 2);
  EXPECT_EQ(cli("predict").exit_code, 2);
  EXPECT_EQ(cli("--help").exit_code, 0);
}

TEST(Cli, PackWritesAValidIODeep) {
  fixtures::TempDir dir;
  const auto file = dir.path() / "toy.dcm";
  const auto r = cli(pack_toy(file, "1.2.826.0.1.3680043.10.1147.8.1"));
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(json::parse(r.out).at("DnnUID"), "1.2.826.0.1.3680043.10.1147.8.1");
  const auto desc = iod::parse_iodeep(dicom::read_file(file).body);
  EXPECT_EQ(desc.modality, "MR");
  EXPECT_EQ(desc.body_part_examined, "BRAIN");
  EXPECT_EQ(desc.dnn_name, "toy_unet");
  EXPECT_EQ(desc.dnn_weights, "pacs:weights/1.2.826.0.1.3680043.10.1147.8.1.iodw");
  EXPECT_TRUE(fs::is_regular_file(dir.path() / "1.2.826.0.1.3680043.10.1147.8.1.iodw"));
}

TEST(Cli, PackInlineCarriesTheWeights) {
  fixtures::TempDir dir;
  const auto file = dir.path() / "inline.dcm";
  ASSERT_EQ(cli(pack_toy(file, "1.2.826.0.1.3680043.10.1147.8.2", "--weights-mode inline")).exit_code, 0);
  const auto desc = iod::parse_iodeep(dicom::read_file(file).body);
  EXPECT_TRUE(desc.dnn_weights.starts_with("data:"));
  EXPECT_EQ(nn::encode_weights(nn::load_weights(desc.dnn_weights)), fixtures::toy_unet().weights);
}

TEST(Cli, PackRejectsInconsistentPixelSpec) {
  fixtures::TempDir dir;
  const auto file = dir.path() / "bad.dcm";
  const auto r = cli(pack_toy(file, "1.2.826.0.1.3680043.10.1147.8.3", "--samples 3 --photometric MONOCHROME2"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_FALSE(fs::exists(file));
}

TEST(Cli, SynthIsDeterministic) {
  fixtures::TempDir a, b;
  const auto ra = cli("synth -o " + q(a.path()) + " --count 3 --seed 5");
  const auto rb = cli("synth -o " + q(b.path()) + " --count 3 --seed 5");
  ASSERT_EQ(ra.exit_code, 0);
  const auto files = json::parse(ra.out);
  ASSERT_EQ(files.size(), 3u);
  for (const auto& f : files) {
    const fs::path name = fs::path(f.at("file").get<std::string>()).filename();
    EXPECT_EQ(dicom::read_bytes(a.path() / name), dicom::read_bytes(b.path() / name));
  }
}

TEST(Cli, EmptyStoreIsNoMatchingNetwork) {
  fixtures::TempDir store, slices;
  fixtures::ServeProcess serve(kCli, store.path());
  ASSERT_EQ(cli("synth -o " + q(slices.path()) + " --count 1 --seed 2").exit_code, 0);
  const auto imported = cli("import --server " + serve.url() + " " + q(slices.path()));
  ASSERT_EQ(imported.exit_code, 0);
  const auto uid = json::parse(imported.out).at(0).at("SOPInstanceUID").get<std::string>();
  EXPECT_EQ(cli("predict --server " + serve.url() + " --slice " + uid).exit_code, 3);
}

TEST(Cli, UnreachableServerExitsFour) {
  EXPECT_EQ(cli("ls --server http://127.0.0.1:1").exit_code, 4);
}

TEST(Cli, WeightsFileMustBeNamedByDnnUid) {
  // Rejected before any request, so the unreachable server is never hit.
  const auto weights = fixtures::assets_dir() / "networks" / "toy_unet.iodw";
  EXPECT_EQ(cli("import --server http://127.0.0.1:1 " + q(weights)).exit_code, 1);
}

TEST(Cli, ServeImportPredictSubmit) {
  fixtures::TempDir store, work;
  fixtures::ServeProcess serve(kCli, store.path());
  const auto server = " --server " + serve.url();
  fs::create_directories(work.path() / "net");

  ASSERT_EQ(cli(pack_toy(work.path() / "net" / "toy.dcm", "1.2.826.0.1.3680043.10.1147.8.4")).exit_code, 0);
  ASSERT_EQ(cli("synth -o " + q(work.path() / "slices") + " --count 10 --seed 12").exit_code, 0);
  ASSERT_EQ(cli("import" + server + " " + q(work.path() / "net")).exit_code, 0);
  const auto imported = cli("import" + server + " " + q(work.path() / "slices"));
  ASSERT_EQ(imported.exit_code, 0);
  const auto rows = json::parse(imported.out);
  ASSERT_EQ(rows.size(), 10u);

  // Synthetic slices share one study; the IODeep is its own study.
  const auto studies = cli("-q ls --level study" + server);
  ASSERT_EQ(studies.exit_code, 0);
  EXPECT_EQ(std::count(studies.out.begin(), studies.out.end(), '\n'), 2);
  // The IODeep is an MR/BRAIN series of its own.
  const auto mr = json::parse(cli("ls --level series -f Modality=MR -f BodyPartExamined=BRAIN" + server).out);
  ASSERT_EQ(mr.size(), 2u);
  EXPECT_TRUE(mr[0].at("SeriesInstanceUID") == "1.2.826.0.1.3680043.10.1147.8.4" ||
              mr[1].at("SeriesInstanceUID") == "1.2.826.0.1.3680043.10.1147.8.4");
  EXPECT_EQ(cli("ls -f PatientName=X" + server).exit_code, 1);

  // Selection through the packed instance.
  pacs::PacsClient client(serve.url());
  const auto slice_uid = rows.at(0).at("SOPInstanceUID").get<std::string>();
  std::vector<iod::IODeepDescriptor> candidates;
  for (const auto& s : client.query(pacs::Level::Instance, {{"SOPClassUID", std::string(iod::kIODeepSOPClassUID)}})) {
    candidates.push_back(iod::parse_iodeep(dicom::decode_file(client.retrieve_instance(s.uid)).body));
  }
  const auto slice = dicom::decode_file(client.retrieve_instance(slice_uid)).body;
  EXPECT_EQ(selection::select_network(iod::slice_tags_of(slice), candidates).matched_uid,
            "1.2.826.0.1.3680043.10.1147.8.4");

  const auto rois = work.path() / "rois.json";
  ASSERT_EQ(cli("predict" + server + " --slice " + slice_uid + " -o " + q(rois)).exit_code, 0);
  const auto prediction = json::parse(fixtures::read_text(rois));
  const auto frame = prediction.at("frame_of_reference_uid").get<std::string>();
  EXPECT_EQ(frame, slice.text_or_empty(dicom::tags::FrameOfReferenceUID));
  ASSERT_FALSE(prediction.at("proposals").empty());
  for (const auto& p : prediction.at("proposals")) EXPECT_EQ(p.at("slice_ref_uid"), frame);

  // The CLI and the API run the same pipeline.
  const auto api = client.predict(slice_uid);
  ASSERT_EQ(api.proposals.size(), prediction.at("proposals").size());

  const auto submitted = cli("submit" + server + " --from " + q(rois) + " --reviewer DOE^JANE --accept-all");
  ASSERT_EQ(submitted.exit_code, 0);
  const auto rs_uid = json::parse(submitted.out).at("SOPInstanceUID").get<std::string>();
  const auto rs = dicom::decode_file(client.retrieve_instance(rs_uid)).body;
  EXPECT_EQ(rs.text(dicom::tags::ReviewerName), "DOE^JANE");
  EXPECT_EQ(rs.items(dicom::tags::ROIContourSequence)->size(), prediction.at("proposals").size());
  // A session validates once.
  EXPECT_EQ(cli("submit" + server + " --from " + q(rois) + " --reviewer DOE^JANE --accept-all").exit_code, 1);
}
