#include <gtest/gtest.h>

#include "faceseg/manifest.hpp"
#include "faceseg/png_io.hpp"
#include "fixtures.hpp"

using namespace faceseg;

TEST(Manifest, EmptyManifestHasZeroCountsAndNoViolations) {
  const ManifestSummary s = validate_manifest(Manifest{});
  EXPECT_EQ(s.total_records, 0u);
  EXPECT_TRUE(s.valid());
  for (const auto& [tag, n] : s.tag_counts) EXPECT_EQ(n, 0u);
  for (const auto& [kind, n] : s.asset_counts) EXPECT_EQ(n, 0u);
}

TEST(Manifest, DatasetShapedCounts) {
  Manifest m = fixtures::synthetic_manifest(3754);
  for (std::size_t i = 0; i < 1423; ++i) m.records[i * 2].tags.insert(FaceTag::kNewCategory);
  const ManifestSummary s = validate_manifest(m, {.check_paths = false});
  EXPECT_TRUE(s.valid());
  EXPECT_EQ(s.total_records, 3754u);
  EXPECT_EQ(s.tag_counts.at(FaceTag::kNewCategory), 1423u);
}

TEST(Manifest, AssetKindCounts) {
  Manifest m;
  for (int i = 0; i < 40; ++i) m.assets.push_back(fixtures::make_sunglasses("sg" + std::to_string(i)).record);
  for (int i = 0; i < 12; ++i) m.assets.push_back(fixtures::make_mouth_mask("mm" + std::to_string(i)).record);
  const ManifestSummary s = validate_manifest(m, {.check_paths = false});
  EXPECT_TRUE(s.valid());
  EXPECT_EQ(s.asset_counts.at(AssetKind::kSunglasses), 40u);
  EXPECT_EQ(s.asset_counts.at(AssetKind::kMouthMask), 12u);
  EXPECT_EQ(s.asset_counts.at(AssetKind::kHand), 0u);
}

TEST(Manifest, ViolationsAreReportedNotThrown) {
  Manifest m = fixtures::synthetic_manifest(2);
  m.records[1].id = m.records[0].id;
  AssetRecord hand = fixtures::make_hand("h", {}).record;
  hand.source_face.reset();
  m.assets.push_back(hand);
  AssetRecord sg = fixtures::make_sunglasses("sg").record;
  sg.source_face = SourceFace{{0, 0}, 10, {}};
  m.assets.push_back(sg);
  const ManifestSummary s = validate_manifest(m, {.check_paths = true});
  EXPECT_FALSE(s.valid());
  // duplicate id, two missing images, hand without source face, sunglasses with one,
  // two missing asset files
  EXPECT_EQ(s.violations.size(), 7u);
  EXPECT_EQ(validate_manifest(m).violations, s.violations);
}

TEST(Manifest, JsonRoundTrip) {
  fixtures::TempDir dir;
  const auto path = fixtures::write_dataset(dir.path(), {.faces = 3, .sunglasses = 1, .masks = 1, .hands = 1,
                                                         .with_poses = true});
  const Manifest a = load_manifest(path);
  EXPECT_TRUE(validate_manifest(a).valid());
  ASSERT_EQ(a.records.size(), 3u);
  ASSERT_EQ(a.assets.size(), 3u);
  EXPECT_EQ(manifest_to_json(a), manifest_to_json(manifest_from_json(manifest_to_json(a), dir.path())));
  EXPECT_TRUE(a.records[0].landmarks.has_value());
  EXPECT_TRUE(a.records[0].pose.has_value());
  EXPECT_TRUE(a.find_asset("hand0")->source_face.has_value());
  EXPECT_EQ(a.find_asset("sg0")->anchors.lens_left->x, 30.0);
}

TEST(Manifest, SidecarFilesAreRead) {
  fixtures::TempDir dir;
  const auto sg = fixtures::make_sunglasses("sgA", 110);
  png::save_rgba(dir / "assets/sunglasses/sgA.png", sg.rgba);
  write_json_file(dir / "assets/sunglasses/sgA.meta.json", asset_meta_to_json(sg.record));
  write_json_file(dir / "lm.json", landmarks_to_json(fixtures::five_point({})));
  write_json_file(dir / "manifest.json",
                  {{"schema_version", 1},
                   {"records", {{{"id", "a"}, {"image", "a.png"}, {"landmarks", "lm.json"}, {"tags", {"real-hands"}}}}},
                   {"assets", {{{"id", "sgA"}, {"kind", "sunglasses"}, {"rgba", "assets/sunglasses/sgA.png"}}}}});
  const Manifest m = load_manifest(dir / "manifest.json");
  ASSERT_TRUE(m.records[0].landmarks.has_value());
  EXPECT_EQ(m.records[0].landmarks->points().size(), 5u);
  EXPECT_TRUE(m.records[0].has_tag(FaceTag::kRealHands));
  EXPECT_EQ(m.assets[0].anchors.lens_right->x, 140.0);

  const auto scanned = scan_asset_directory(dir / "assets");
  ASSERT_EQ(scanned.size(), 1u);
  EXPECT_EQ(scanned[0].id, "sgA");
  EXPECT_EQ(scanned[0].kind, AssetKind::kSunglasses);
}

TEST(Manifest, WrongSchemaVersionIsRejected) {
  EXPECT_THROW(manifest_from_json({{"schema_version", 99}, {"records", nlohmann::json::array()}}, {}), Error);
  EXPECT_THROW(manifest_from_json({{"schema_version", 1}, {"records", {{{"image", "x"}}}}}, {}), Error);
}

TEST(Manifest, UnknownTagIsRejected) {
  EXPECT_THROW(face_tag_from_string("real-hats"), Error);
}
