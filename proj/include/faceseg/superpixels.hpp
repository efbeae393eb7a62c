#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "faceseg/classes.hpp"

namespace faceseg {

// Dense segment ids 0..segment_count-1, one per pixel.
struct SuperpixelMap {
  Image<std::int32_t> segments;
  int segment_count = 0;

  int width() const { return segments.width(); }
  int height() const { return segments.height(); }
  std::int32_t at(int x, int y) const { return segments.at(x, y); }
};

struct SLICParams {
  int k = 550;
  double compactness = 10.0;
  int max_iters = 10;
};

SuperpixelMap slic(const RgbImage& image, const SLICParams& params = {});

// Remaps ids to 0..S-1 in order of first appearance (row-major scan).
SuperpixelMap densify(const Image<std::int32_t>& ids);

// 16-bit grayscale PNG. load throws MalformedSegmentFile.
SuperpixelMap load_segments(const std::filesystem::path& path);
SuperpixelMap decode_segments(const std::vector<std::uint8_t>& png_bytes);
std::vector<std::uint8_t> encode_segments(const SuperpixelMap& map);
void save_segments(const std::filesystem::path& path, const SuperpixelMap& map);

// Throws UnknownSegment for assignment keys outside the map.
LabelMap rasterize(const SuperpixelMap& segmap, const std::map<int, ClassId>& assignments,
                   ClassId fallback = ClassId::kBackground);

// 1 where the right or bottom neighbour carries a different id.
Mask boundaries(const SuperpixelMap& segmap);

// Number of 4-connected components per segment id (1 everywhere when valid).
std::vector<int> component_counts(const SuperpixelMap& segmap);

}  // namespace faceseg
