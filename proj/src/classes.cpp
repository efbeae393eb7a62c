#include "faceseg/classes.hpp"

#include <string>

#include "faceseg/png_io.hpp"

namespace faceseg {

std::optional<ClassId> try_class_from_index(int id) {
  if (id < 0 || id >= kNumClasses) return std::nullopt;
  return static_cast<ClassId>(id);
}

ClassId class_from_index(int id) {
  if (auto c = try_class_from_index(id)) return *c;
  throw Error(ErrorKind::kUnknownClass, "class id " + std::to_string(id) + " is not in 0..6");
}

std::string_view class_name(ClassId c) {
  switch (c) {
    case ClassId::kBackground: return "background";
    case ClassId::kSkin: return "skin";
    case ClassId::kHair: return "hair";
    case ClassId::kBeardMustache: return "beard-mustache";
    case ClassId::kSunglasses: return "sunglasses";
    case ClassId::kHeadWearable: return "head-wearable";
    case ClassId::kMouthMask: return "mouth-mask";
  }
  return "unknown";
}

Palette Palette::standard() {
  return Palette({{{0, 0, 0},
                   {0, 255, 0},
                   {255, 0, 0},
                   {255, 255, 0},
                   {0, 0, 255},
                   {255, 0, 255},
                   {0, 255, 255}}});
}

Palette::Palette(const std::array<Rgb8, kNumClasses>& colors) : colors_(colors) {
  for (int i = 0; i < kNumClasses; ++i) {
    for (int j = i + 1; j < kNumClasses; ++j) {
      if (colors_[i] == colors_[j]) {
        throw Error(ErrorKind::kInvalidManifest, "palette classes " + std::to_string(i) + " and " +
                                                     std::to_string(j) + " share a colour");
      }
    }
  }
}

std::optional<ClassId> Palette::lookup(Rgb8 color) const {
  for (int i = 0; i < kNumClasses; ++i) {
    if (colors_[i] == color) return static_cast<ClassId>(i);
  }
  return std::nullopt;
}

LabelMap decode_label_map(const RgbImage& image, const Palette& palette) {
  LabelMap map(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const Rgb8 p = image.at(x, y);
      auto c = palette.lookup(p);
      if (!c) {
        throw Error(ErrorKind::kUnknownColor,
                    "pixel (" + std::to_string(x) + ", " + std::to_string(y) + ") has colour (" +
                        std::to_string(p.r) + ", " + std::to_string(p.g) + ", " +
                        std::to_string(p.b) + ")");
      }
      map.at(x, y) = *c;
    }
  }
  return map;
}

RgbImage encode_label_map(const LabelMap& map, const Palette& palette) {
  RgbImage image(map.width(), map.height());
  for (std::size_t i = 0; i < map.size(); ++i) {
    image.data()[i] = palette.color(map.data()[i]);
  }
  return image;
}

LabelMap load_label_map(const std::filesystem::path& path, const Palette& palette) {
  return decode_label_map(png::load_rgb(path), palette);
}

void save_label_map(const std::filesystem::path& path, const LabelMap& map,
                    const Palette& palette) {
  png::save_rgb(path, encode_label_map(map, palette));
}

ClassHistogram class_histogram(const LabelMap& map) {
  ClassHistogram counts{};
  for (ClassId c : map.data()) ++counts[to_index(c)];
  return counts;
}

}  // namespace faceseg
