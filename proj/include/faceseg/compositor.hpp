#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "faceseg/classes.hpp"
#include "faceseg/colorspace.hpp"
#include "faceseg/manifest.hpp"

namespace faceseg {

// Similarity transform from asset pixel coordinates to face image coordinates:
// dst = R(rotation) * (scale * src) + translation.
struct Placement {
  double scale = 1;
  double rotation_deg = 0;
  Point2 translation;
  double opacity = 1;

  Point2 apply(Point2 src) const;
  Point2 invert(Point2 dst) const;
};

inline constexpr double kSunglassesOpacity = 0.85;
inline constexpr double kMaskHeightPerInterocular = 1.4;
inline constexpr double kLabelAlphaThreshold = 0.5;

struct Provenance {
  std::string face_id;
  std::string asset_id;
  AssetKind kind = AssetKind::kSunglasses;
  Placement placement;
  std::uint64_t seed = 0;
};

struct AugmentedSample {
  RgbImage image;
  LabelMap labels;
  Provenance provenance;
};

// A face with its pixels and ground truth loaded.
struct FaceSample {
  std::string id;
  RgbImage image;
  LabelMap labels;
  std::optional<Landmarks> landmarks;
};

struct AssetImage {
  AssetRecord record;
  RgbaImage rgba;
};

// Straight-alpha over operator: out = top * a' + bottom * (1 - a'), a' = alpha * opacity.
RgbF alpha_blend(RgbF bottom, RgbaF top, double opacity);

Placement sunglasses_placement(const Landmarks& landmarks, const AssetRecord& asset, double k = 1.0);
Placement mouth_mask_placement(const Landmarks& landmarks, const AssetRecord& asset);
Placement hand_placement(const Landmarks& target, const AssetRecord& hand);

// Warps `asset` (straight alpha, [0,1]) with bilinear sampling, blends it into
// `image`, and writes `label` wherever the nearest source texel has
// alpha >= 0.5. Pixels the warped asset does not reach are untouched.
void composite(RgbImage& image, LabelMap& labels, const Image<RgbaF>& asset,
               const Placement& placement, ClassId label);

Image<RgbaF> to_float(const RgbaImage& rgba);

// Lab statistics of the hand pixels (alpha >= 0.5).
ColorStats hand_skin_stats(const RgbaImage& hand);
// Colour-transfers every hand pixel to `tone`; alpha is preserved.
Image<RgbaF> recolor_hand(const RgbaImage& hand, const ColorStats& tone);
// Tone of the target face measured over face_tone_region.
ColorStats face_tone(const RgbImage& image, const Landmarks& landmarks);

AugmentedSample place_sunglasses(const FaceSample& face, const AssetImage& asset, double k = 1.0);
AugmentedSample place_mouth_mask(const FaceSample& face, const AssetImage& asset);
AugmentedSample place_hand(const FaceSample& target, const AssetImage& hand, const ColorStats& tone);

}  // namespace faceseg
