#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "faceseg/augment.hpp"
#include "faceseg/compositor.hpp"
#include "faceseg/png_io.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace faceseg;
namespace fs = std::filesystem;
using fixtures::in_footprint;

namespace {

void expect_locality(const FaceSample& in, const AugmentedSample& out, int aw, int ah) {
  for (int y = 0; y < in.image.height(); ++y) {
    for (int x = 0; x < in.image.width(); ++x) {
      if (in_footprint(out.provenance.placement, aw, ah, {double(x), double(y)})) continue;
      ASSERT_EQ(out.image.at(x, y), in.image.at(x, y)) << x << "," << y;
      ASSERT_EQ(out.labels.at(x, y), in.labels.at(x, y)) << x << "," << y;
    }
  }
}

int changed_to_other_than(const LabelMap& before, const LabelMap& after, ClassId allowed) {
  int bad = 0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before.data()[i] != after.data()[i] && after.data()[i] != allowed) ++bad;
  }
  return bad;
}

int count(const LabelMap& m, ClassId c) {
  return static_cast<int>(std::count(m.data().begin(), m.data().end(), c));
}

}  // namespace

TEST(AlphaBlend, Examples) {
  const RgbF bottom{0.2, 0.4, 0.6};
  const RgbF same = alpha_blend(bottom, {1, 1, 1, 1}, 0.0);
  EXPECT_EQ(same.r, 0.2);
  EXPECT_EQ(same.b, 0.6);
  const RgbF top = alpha_blend(bottom, {0.9, 0.1, 0.3, 1}, 1.0);
  EXPECT_DOUBLE_EQ(top.r, 0.9);
  EXPECT_DOUBLE_EQ(top.g, 0.1);
  const RgbF grey = alpha_blend({0, 0, 0}, {1, 1, 1, 1}, 0.85);
  EXPECT_NEAR(grey.r, 0.85, 1e-15);
  EXPECT_NEAR(grey.g, 0.85, 1e-15);
  EXPECT_NEAR(grey.b, 0.85, 1e-15);
}

TEST(Placement, ApplyInvertRoundTrip) {
  const Placement p{1.7, 23.0, {40, -12}, 1};
  const Point2 q = p.invert(p.apply({13, 57}));
  EXPECT_NEAR(q.x, 13, 1e-12);
  EXPECT_NEAR(q.y, 57, 1e-12);
}

TEST(Sunglasses, HorizontalEyesHalfScale) {
  const Landmarks lm(LandmarkScheme::kFivePoint, {{100, 100}, {160, 100}, {130, 120}, {115, 140}, {145, 140}});
  const auto asset = fixtures::make_sunglasses("sg", 120);
  const Placement p = sunglasses_placement(lm, asset.record);
  EXPECT_NEAR(p.rotation_deg, 0.0, 1e-12);
  EXPECT_NEAR(p.scale, 0.5, 1e-12);
  const Point2 left = p.apply(*asset.record.anchors.lens_left);
  const Point2 right = p.apply(*asset.record.anchors.lens_right);
  EXPECT_NEAR(left.x, 100, 1e-9);
  EXPECT_NEAR(left.y, 100, 1e-9);
  EXPECT_NEAR(right.x, 160, 1e-9);
  EXPECT_NEAR(right.y, 100, 1e-9);
  EXPECT_EQ(p.opacity, kSunglassesOpacity);
}

TEST(Sunglasses, TiltedEyeLineRotatesAsset) {
  fixtures::FaceSpec spec;
  spec.tilt_deg = 10;
  const auto p = sunglasses_placement(fixtures::five_point(spec), fixtures::make_sunglasses("sg").record);
  EXPECT_NEAR(p.rotation_deg, 10.0, 1e-9);
}

TEST(Sunglasses, LocalityAndClosure) {
  fixtures::FaceSpec spec;
  spec.tilt_deg = -7;
  const FaceSample face = fixtures::make_face("f", spec);
  const AssetImage asset = fixtures::make_sunglasses("sg", 110);
  const AugmentedSample out = place_sunglasses(face, asset);
  expect_locality(face, out, asset.rgba.width(), asset.rgba.height());
  EXPECT_EQ(changed_to_other_than(face.labels, out.labels, ClassId::kSunglasses), 0);
  EXPECT_GT(count(out.labels, ClassId::kSunglasses), 100);
  const Point2 el = face.landmarks->eye_left();
  EXPECT_EQ(out.labels.at(int(std::lround(el.x)), int(std::lround(el.y))), ClassId::kSunglasses);
}

TEST(Sunglasses, MissingLandmarksAndAnchors) {
  FaceSample face = fixtures::make_face("f");
  AssetImage asset = fixtures::make_sunglasses("sg");
  asset.record.anchors.lens_right.reset();
  try {
    place_sunglasses(face, asset);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kAssetAnchorMissing);
  }
  face.landmarks.reset();
  try {
    place_sunglasses(face, fixtures::make_sunglasses("sg"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissingLandmarks);
  }
}

TEST(MouthMask, ClassSixIffOpaqueTexels) {
  const FaceSample face = fixtures::make_face("f");
  const AssetImage mask = fixtures::make_mouth_mask("m");
  EXPECT_GT(count(place_mouth_mask(face, mask).labels, ClassId::kMouthMask), 0);
  AssetImage faint = mask;
  for (auto& p : faint.rgba.data()) p.a = std::min<std::uint8_t>(p.a, 120);
  EXPECT_EQ(count(place_mouth_mask(face, faint).labels, ClassId::kMouthMask), 0);
}

TEST(MouthMask, HeightProportionalToInterocular) {
  const AssetImage mask = fixtures::make_mouth_mask("m");
  fixtures::FaceSpec a;
  a.interocular = 40;
  fixtures::FaceSpec b = a;
  b.interocular = 80;
  auto rendered_height = [&](const fixtures::FaceSpec& s) {
    const Placement p = mouth_mask_placement(fixtures::five_point(s), mask.record);
    const Point2 top = p.apply(*mask.record.anchors.top_center);
    const Point2 bottom = p.apply(*mask.record.anchors.bottom_center);
    return std::hypot(bottom.x - top.x, bottom.y - top.y);
  };
  EXPECT_NEAR(rendered_height(a), 1.4 * 40, 1e-9);
  EXPECT_NEAR(rendered_height(b), 2 * rendered_height(a), 1e-9);
}

TEST(MouthMask, CoversMouthAndStaysUpright) {
  fixtures::FaceSpec spec;
  spec.tilt_deg = 8;
  const FaceSample face = fixtures::make_face("f", spec);
  const AssetImage mask = fixtures::make_mouth_mask("m");
  const AugmentedSample out = place_mouth_mask(face, mask);
  for (Point2 p : {face.landmarks->mouth_left(), face.landmarks->mouth_right(), face.landmarks->mouth_center()}) {
    EXPECT_EQ(out.labels.at(int(std::lround(p.x)), int(std::lround(p.y))), ClassId::kMouthMask);
  }
  const Point2 top = out.provenance.placement.apply(*mask.record.anchors.top_center);
  const Point2 bottom = out.provenance.placement.apply(*mask.record.anchors.bottom_center);
  EXPECT_GT(bottom.y, top.y);
  EXPECT_EQ(changed_to_other_than(face.labels, out.labels, ClassId::kMouthMask), 0);
  expect_locality(face, out, mask.rgba.width(), mask.rgba.height());
}

TEST(Hand, IdentityFrames) {
  const Landmarks lm = fixtures::five_point({});
  const FaceFrame f = face_frame(lm);
  AssetRecord hand = fixtures::make_hand("h", {}, f.center, f.size).record;
  const Placement p = hand_placement(lm, hand);
  EXPECT_NEAR(p.scale, 1.0, 1e-12);
  EXPECT_NEAR(p.rotation_deg, 0.0, 1e-12);
  const Point2 q = p.apply({17, 33});
  EXPECT_NEAR(q.x, 17, 1e-9);
  EXPECT_NEAR(q.y, 33, 1e-9);
}

TEST(Hand, OffsetsScaleWithFaceSize) {
  const Landmarks lm = fixtures::five_point({});
  const FaceFrame f = face_frame(lm);
  const Point2 src_center{40, 60};
  const AssetRecord hand = fixtures::make_hand("h", {}, src_center, f.size / 2).record;
  const Placement p = hand_placement(lm, hand);
  const Point2 q = p.apply({src_center.x + 10, src_center.y - 20});
  EXPECT_NEAR(q.x - f.center.x, 20, 1e-9);
  EXPECT_NEAR(q.y - f.center.y, -40, 1e-9);
}

TEST(Hand, CoveredPixelsBecomeBackground) {
  const FaceSample face = fixtures::make_face("f");
  const AssetImage hand = fixtures::make_hand("h", {}, {45, 40}, 150);
  const ColorStats tone = face_tone(face.image, *face.landmarks);
  const AugmentedSample out = place_hand(face, hand, tone);
  EXPECT_EQ(changed_to_other_than(face.labels, out.labels, ClassId::kBackground), 0);
  EXPECT_LT(count(out.labels, ClassId::kSkin), count(face.labels, ClassId::kSkin));
  expect_locality(face, out, hand.rgba.width(), hand.rgba.height());
  try {
    AssetImage bad = hand;
    bad.record.source_face.reset();
    place_hand(face, bad, tone);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissingSourceFace);
  }
}

TEST(Hand, RecolouredPixelsCarryFaceTone) {
  const FaceSample face = fixtures::make_face("f");
  const AssetImage hand = fixtures::make_hand("h", {});
  const ColorStats tone = face_tone(face.image, *face.landmarks);
  const Image<RgbaF> recolored = recolor_hand(hand.rgba, tone);
  std::vector<LabTriple> labs;
  for (const RgbaF& p : recolored.data()) {
    if (p.a >= kLabelAlphaThreshold) labs.push_back(rgb_to_lab({p.r, p.g, p.b}));
  }
  const ColorStats got = lab_stats(labs);
  EXPECT_NEAR(got.mean.l, tone.mean.l, 1e-3);
  EXPECT_NEAR(got.mean.alpha, tone.mean.alpha, 1e-3);
  EXPECT_NEAR(got.mean.beta, tone.mean.beta, 1e-3);
  EXPECT_NEAR(got.std.l, tone.std.l, 1e-3);
  EXPECT_NEAR(got.std.alpha, tone.std.alpha, 1e-3);
  EXPECT_NEAR(got.std.beta, tone.std.beta, 1e-3);
}

TEST(Composite, DimensionsPreserved) {
  const FaceSample face = fixtures::make_face("f", {.width = 200, .height = 180, .center = {100, 90}});
  const AugmentedSample out = place_sunglasses(face, fixtures::make_sunglasses("sg"));
  EXPECT_EQ(out.image.width(), 200);
  EXPECT_EQ(out.image.height(), 180);
  EXPECT_TRUE(out.image.same_shape(out.labels));
}

TEST(Composite, AssetOutsideImageChangesNothing) {
  const FaceSample face = fixtures::make_face("f");
  RgbImage img = face.image;
  LabelMap labels = face.labels;
  composite(img, labels, to_float(fixtures::make_sunglasses("sg").rgba), {1, 0, {1000, 1000}, 1},
            ClassId::kSunglasses);
  EXPECT_EQ(img, face.image);
  EXPECT_EQ(labels, face.labels);
}

namespace {

AugmentationPlan plan_of(std::vector<AugmentJob> jobs, std::uint64_t seed = 9) {
  AugmentationPlan plan;
  plan.seed = seed;
  plan.jobs = std::move(jobs);
  return plan;
}

}  // namespace

TEST(AugmentBatch, EmptyPlan) {
  fixtures::TempDir dir;
  const Manifest m = load_manifest(fixtures::write_dataset(dir / "data", {.faces = 1}));
  const BatchResult r = augment_batch(plan_of({}), m, {.out_dir = dir / "out"});
  EXPECT_EQ(r.report.attempted, 0u);
  EXPECT_EQ(r.report.succeeded, 0u);
  EXPECT_TRUE(r.report.failures.empty());
  EXPECT_TRUE(r.provenance.empty());
}

TEST(AugmentBatch, DeterministicAcrossRunsAndWorkerCounts) {
  fixtures::TempDir dir;
  const Manifest m = load_manifest(fixtures::write_dataset(dir / "data", {.faces = 3, .sunglasses = 2, .masks = 1}));
  std::vector<AugmentJob> jobs;
  for (const auto& r : m.records) {
    jobs.push_back({r.id, "sg0", AssetKind::kSunglasses});
    jobs.push_back({r.id, "mask0", AssetKind::kMouthMask});
  }
  jobs.push_back({"face0", "sg0", AssetKind::kSunglasses});
  const auto a = augment_batch(plan_of(jobs), m, {.out_dir = dir / "a", .workers = 1});
  const auto b = augment_batch(plan_of(jobs), m, {.out_dir = dir / "b", .workers = 3});
  EXPECT_EQ(a.report.succeeded, jobs.size());
  EXPECT_EQ(png::read_bytes(dir / "a/provenance.jsonl"), png::read_bytes(dir / "b/provenance.jsonl"));
  for (const auto& stem : output_stems(jobs)) {
    EXPECT_EQ(png::read_bytes(dir / ("a/images/" + stem + ".png")), png::read_bytes(dir / ("b/images/" + stem + ".png")));
    EXPECT_EQ(png::read_bytes(dir / ("a/labels/" + stem + ".png")), png::read_bytes(dir / ("b/labels/" + stem + ".png")));
  }
  EXPECT_TRUE(fs::exists(dir / "a/images/face0_sg0_1.png"));
}

TEST(AugmentBatch, FaceWithoutLandmarksIsARecordedFailure) {
  fixtures::TempDir dir;
  const auto path = fixtures::write_dataset(dir / "data", {.faces = 10, .sunglasses = 1, .masks = 0});
  Manifest m = load_manifest(path);
  m.records[4].landmarks.reset();
  std::vector<AugmentJob> jobs;
  for (const auto& r : m.records) jobs.push_back({r.id, "sg0", AssetKind::kSunglasses});
  const BatchResult r = augment_batch(plan_of(jobs), m, {.out_dir = dir / "out", .workers = 2});
  EXPECT_EQ(r.report.attempted, 10u);
  EXPECT_EQ(r.report.succeeded, 9u);
  ASSERT_EQ(r.report.failures.size(), 1u);
  EXPECT_EQ(r.report.failures[0].face_id, "face4");
  EXPECT_EQ(r.provenance.size(), 9u);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "out/images")) ++files;
  EXPECT_EQ(files, 9u);
}

TEST(AugmentBatch, JobSeedDependsOnlyOnIdentity) {
  EXPECT_EQ(job_seed(1, "a", "b"), job_seed(1, "a", "b"));
  EXPECT_NE(job_seed(1, "a", "b"), job_seed(2, "a", "b"));
  EXPECT_NE(job_seed(1, "a", "b"), job_seed(1, "b", "a"));
}

TEST(AugmentBatch, ProvenanceReplaysTheSample) {
  fixtures::TempDir dir;
  const Manifest m = load_manifest(fixtures::write_dataset(dir / "data", {.faces = 1, .sunglasses = 1, .masks = 0}));
  const AugmentedSample s = run_job(m, {"face0", "sg0", AssetKind::kSunglasses}, 3);
  const FaceSample face = load_face(m, m.records[0]);
  RgbImage img = face.image;
  LabelMap labels = face.labels;
  composite(img, labels, to_float(load_asset(m, m.assets[0]).rgba), s.provenance.placement, ClassId::kSunglasses);
  EXPECT_EQ(img, s.image);
  EXPECT_EQ(labels, s.labels);
  const auto j = provenance_to_json(s.provenance);
  EXPECT_EQ(j.at("face_id"), "face0");
  EXPECT_EQ(j.at("seed").get<std::uint64_t>(), job_seed(3, "face0", "sg0"));
}
