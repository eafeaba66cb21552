#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "iodeep/selection.hpp"

using namespace iodeep;
using iod::SliceTagSet;

namespace {

iod::IODeepDescriptor net(const std::string& uid, const std::string& modality, std::uint32_t samples,
                          const std::string& body) {
  return iod::make_descriptor(uid, "n", "{}", "w", modality, body, samples,
                              samples == 3 ? "RGB" : "MONOCHROME2");
}

}  // namespace

TEST(Selection, EqualityPathPicksMatchingCandidate) {
  const std::vector candidates{net("1.1", "CT", 1, "ABDOMEN"), net("1.2", "MR", 1, "BREAST")};
  const auto r = selection::select_network({"MR", 1, "BREAST", std::nullopt}, candidates);
  EXPECT_EQ(r.matched_uid, "1.2");
  EXPECT_EQ(r.examined, 2u);
  EXPECT_FALSE(r.matched_on_description);
}

TEST(Selection, DescriptionContainment) {
  const std::vector candidates{net("1.3", "MR", 1, "BRAIN TUMOR")};
  const auto r = selection::select_network({"MR", 1, std::nullopt, "routine brain tumor follow-up"}, candidates);
  EXPECT_EQ(r.matched_uid, "1.3");
  EXPECT_TRUE(r.matched_on_description);
}

TEST(Selection, DescriptionContainmentIgnoresCaseAndSpacing) {
  const std::vector candidates{net("1.3", "MR", 1, "brain   TUMOR")};
  EXPECT_EQ(selection::select_network({"MR", 1, std::nullopt, "  BRAIN\ttumor  follow up"}, candidates).matched_uid,
            "1.3");
}

TEST(Selection, EmptyCandidateListNeverMatches) {
  const auto r = selection::select_network({"MR", 1, "BREAST", std::nullopt}, {});
  EXPECT_FALSE(r.matched_uid);
  EXPECT_EQ(r.examined, 0u);
}

TEST(Selection, SamplesPerPixelMismatch) {
  const std::vector candidates{net("1.4", "MR", 1, "BREAST")};
  EXPECT_FALSE(selection::select_network({"MR", 3, "BREAST", std::nullopt}, candidates).matched_uid);
}

TEST(Selection, BodyPartPathIsEqualityNotContainment) {
  const std::vector candidates{net("1.5", "MR", 1, "BRAIN")};
  EXPECT_FALSE(selection::select_network({"MR", 1, "BRAIN STEM", std::nullopt}, candidates).matched_uid);
}

TEST(Selection, EmptyCandidateBodyPartNeverMatchesDescription) {
  const std::vector candidates{net("1.6", "MR", 1, "")};
  EXPECT_FALSE(selection::select_network({"MR", 1, std::nullopt, "anything"}, candidates).matched_uid);
}

TEST(Selection, SliceWithoutBodyPartOrDescriptionNeverMatches) {
  const std::vector candidates{net("1.7", "MR", 1, "")};
  const auto r = selection::select_network({"MR", 1, std::nullopt, std::nullopt}, candidates);
  EXPECT_FALSE(r.matched_uid);
  EXPECT_EQ(r.examined, 0u);
}

TEST(Selection, FirstMatchInListOrderWins) {
  const std::vector candidates{net("1.8", "MR", 1, "BRAIN"), net("1.9", "MR", 1, "BRAIN")};
  const auto r = selection::select_network({"MR", 1, "BRAIN", std::nullopt}, candidates);
  EXPECT_EQ(r.matched_uid, "1.8");
  EXPECT_EQ(r.examined, 1u);
}

TEST(Selection, Normalization) {
  EXPECT_EQ(selection::normalize_for_search("  Brain \t Tumor\n"), "brain tumor");
  EXPECT_FALSE(selection::description_contains("brain", ""));
  EXPECT_TRUE(selection::description_contains("Routine BRAIN scan", "brain"));
}

// Randomized agreement with the filter-then-first oracle; the acceptance
// binary runs the exhaustive table.
TEST(Selection, AgreesWithOracleOnRandomInputs) {
  std::mt19937_64 rng(99);
  const std::vector<std::string> modalities{"MR", "CT", "PT"};
  const std::vector<std::string> bodies{"BRAIN", "BREAST", "CHEST", ""};
  const std::vector<std::string> descriptions{"Brain tumor protocol", "chest  CT", ""};
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  for (int i = 0; i < 5000; ++i) {
    SliceTagSet slice;
    slice.modality = modalities[pick(3)];
    slice.samples_per_pixel = pick(2) ? 3 : 1;
    if (auto b = bodies[pick(4)]; !b.empty()) slice.body_part_examined = b;
    if (auto d = descriptions[pick(3)]; !d.empty()) slice.study_description = d;
    std::vector<iod::IODeepDescriptor> candidates;
    for (std::size_t k = pick(5); k > 0; --k) {
      candidates.push_back(net("1." + std::to_string(candidates.size() + 1), modalities[pick(3)], pick(2) ? 3 : 1,
                               bodies[pick(4)]));
    }
    ASSERT_EQ(selection::select_network(slice, candidates).matched_uid, oracle::select(slice, candidates)) << i;
  }
}
