#include <gtest/gtest.h>

#include <random>

#include "faceseg/classes.hpp"
#include "faceseg/png_io.hpp"
#include "fixtures.hpp"

using namespace faceseg;

TEST(Palette, StandardColoursAreDistinctAndStable) {
  const Palette p = Palette::standard();
  EXPECT_EQ(p.color(ClassId::kBackground), (Rgb8{0, 0, 0}));
  EXPECT_EQ(p.color(ClassId::kSkin), (Rgb8{0, 255, 0}));
  EXPECT_EQ(p.color(ClassId::kHair), (Rgb8{255, 0, 0}));
  EXPECT_EQ(p.color(ClassId::kBeardMustache), (Rgb8{255, 255, 0}));
  EXPECT_EQ(p.color(ClassId::kSunglasses), (Rgb8{0, 0, 255}));
  EXPECT_EQ(p.color(ClassId::kHeadWearable), (Rgb8{255, 0, 255}));
  EXPECT_EQ(p.color(ClassId::kMouthMask), (Rgb8{0, 255, 255}));
  for (int c = 0; c < kNumClasses; ++c) {
    EXPECT_EQ(p.lookup(p.color(class_from_index(c))), class_from_index(c));
  }
}

TEST(Palette, RejectsDuplicateColours) {
  auto colors = Palette::standard().colors();
  colors[3] = colors[2];
  EXPECT_THROW(Palette{colors}, Error);
}

TEST(ClassId, OutOfRangeIndexThrows) {
  EXPECT_THROW(class_from_index(7), Error);
  EXPECT_THROW(class_from_index(-1), Error);
  EXPECT_FALSE(try_class_from_index(9).has_value());
}

TEST(LabelMapCodec, AllBlackDecodesToBackground) {
  const LabelMap m = decode_label_map(RgbImage(2, 2, Rgb8{0, 0, 0}), Palette::standard());
  for (ClassId c : m.data()) EXPECT_EQ(c, ClassId::kBackground);
}

TEST(LabelMapCodec, SingleSunglassesPixel) {
  const RgbImage img = encode_label_map(LabelMap(1, 1, ClassId::kSunglasses), Palette::standard());
  EXPECT_EQ(img.at(0, 0), (Rgb8{0, 0, 255}));
}

TEST(LabelMapCodec, UnknownColourReportsPosition) {
  RgbImage img(3, 2, Rgb8{0, 0, 0});
  img.at(2, 1) = {7, 7, 7};
  try {
    decode_label_map(img, Palette::standard());
    FAIL() << "expected UnknownColor";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnknownColor);
    EXPECT_NE(std::string(e.what()).find("(2, 1)"), std::string::npos) << e.what();
  }
}

TEST(LabelMapCodec, RoundTripRandomMaps) {
  std::mt19937_64 gen(11);
  const Palette p = Palette::standard();
  for (int i = 0; i < 100; ++i) {
    const LabelMap m = fixtures::random_label_map(gen, 8, 8);
    EXPECT_EQ(decode_label_map(encode_label_map(m, p), p), m);
  }
}

TEST(LabelMapCodec, PngBytesAreStableAcrossWrites) {
  std::mt19937_64 gen(3);
  const LabelMap m = fixtures::random_label_map(gen, 250, 250);
  fixtures::TempDir dir;
  save_label_map(dir / "a.png", m);
  save_label_map(dir / "b.png", m);
  EXPECT_EQ(png::read_bytes(dir / "a.png"), png::read_bytes(dir / "b.png"));
  EXPECT_EQ(load_label_map(dir / "a.png"), m);
}

TEST(ClassHistogram, AllSkin) {
  const auto h = class_histogram(LabelMap(2, 2, ClassId::kSkin));
  EXPECT_EQ(h[1], 4);
  EXPECT_EQ(h[0] + h[2] + h[3] + h[4] + h[5] + h[6], 0);
}

TEST(ClassHistogram, MixedMap) {
  LabelMap m(2, 2);
  m.at(0, 0) = ClassId::kBackground;
  m.at(1, 0) = ClassId::kBackground;
  m.at(0, 1) = ClassId::kSkin;
  m.at(1, 1) = ClassId::kHair;
  const auto h = class_histogram(m);
  EXPECT_EQ(h[0], 2);
  EXPECT_EQ(h[1], 1);
  EXPECT_EQ(h[2], 1);
}

TEST(ClassHistogram, ConservationAgainstPixelLoop) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> dim(1, 16);
  for (int i = 0; i < 50; ++i) {
    const LabelMap m = fixtures::random_label_map(gen, dim(gen), dim(gen));
    const auto h = class_histogram(m);
    std::array<std::int64_t, kNumClasses> oracle{};
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x) ++oracle[to_index(m.at(x, y))];
    EXPECT_EQ(h, oracle);
    std::int64_t sum = 0;
    for (auto v : h) sum += v;
    EXPECT_EQ(sum, static_cast<std::int64_t>(m.width()) * m.height());
  }
}

TEST(PngIo, RgbaRoundTrip) {
  fixtures::TempDir dir;
  RgbaImage img(5, 3);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 5; ++x) img.at(x, y) = {std::uint8_t(x * 40), std::uint8_t(y * 60), 7, std::uint8_t(x * y * 20)};
  png::save_rgba(dir / "x.png", img);
  EXPECT_EQ(png::load_rgba(dir / "x.png"), img);
}

TEST(PngIo, GarbageBytesThrow) {
  EXPECT_THROW(png::decode({1, 2, 3, 4, 5}), Error);
}
