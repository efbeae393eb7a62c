#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "faceseg/image.hpp"

namespace faceseg {

// The seven face-segmentation classes. Ids are dense and stable.
enum class ClassId : std::uint8_t {
  kBackground = 0,
  kSkin = 1,
  kHair = 2,
  kBeardMustache = 3,
  kSunglasses = 4,
  kHeadWearable = 5,
  kMouthMask = 6,
};

inline constexpr int kNumClasses = 7;

inline constexpr int to_index(ClassId c) { return static_cast<int>(c); }

// Throws UnknownClass for ids outside 0..6.
ClassId class_from_index(int id);
std::optional<ClassId> try_class_from_index(int id);

std::string_view class_name(ClassId c);

using LabelMap = Image<ClassId>;

class Palette {
 public:
  // 0 black, 1 green, 2 red, 3 yellow, 4 blue, 5 magenta, 6 cyan.
  static Palette standard();

  // Throws InvalidManifest if two classes share a colour.
  explicit Palette(const std::array<Rgb8, kNumClasses>& colors);

  Rgb8 color(ClassId c) const { return colors_[to_index(c)]; }
  std::optional<ClassId> lookup(Rgb8 color) const;
  const std::array<Rgb8, kNumClasses>& colors() const { return colors_; }

 private:
  std::array<Rgb8, kNumClasses> colors_;
};

// Throws UnknownColor naming the first offending pixel.
LabelMap decode_label_map(const RgbImage& image, const Palette& palette);
RgbImage encode_label_map(const LabelMap& map, const Palette& palette);

LabelMap load_label_map(const std::filesystem::path& path,
                        const Palette& palette = Palette::standard());
void save_label_map(const std::filesystem::path& path, const LabelMap& map,
                    const Palette& palette = Palette::standard());

using ClassHistogram = std::array<std::int64_t, kNumClasses>;

ClassHistogram class_histogram(const LabelMap& map);

}  // namespace faceseg
