#include "faceseg/compositor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace faceseg {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

Point2 sub(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
Point2 midpoint(Point2 a, Point2 b) { return {(a.x + b.x) / 2, (a.y + b.y) / 2}; }
double angle_of(Point2 v) { return std::atan2(v.y, v.x); }
double norm(Point2 v) { return std::hypot(v.x, v.y); }

const Landmarks& require_landmarks(const FaceSample& face) {
  if (!face.landmarks) {
    throw Error(ErrorKind::kMissingLandmarks, "face '" + face.id + "' has no landmarks");
  }
  return *face.landmarks;
}

void require_kind(const AssetRecord& asset, AssetKind kind) {
  if (asset.kind != kind) {
    throw Error(ErrorKind::kInvalidManifest, "asset '" + asset.id + "' is a " +
                                                 std::string(to_string(asset.kind)) + ", expected " +
                                                 std::string(to_string(kind)));
  }
}

// Translation that maps asset point `anchor` onto face point `target`.
Placement anchored(double scale, double rotation_rad, Point2 anchor, Point2 target, double opacity) {
  Placement p{scale, rotation_rad * kRadToDeg, {0, 0}, opacity};
  const Point2 moved = p.apply(anchor);
  p.translation = sub(target, moved);
  return p;
}

std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

AugmentedSample start_sample(const FaceSample& face, const AssetRecord& asset) {
  if (!face.image.same_shape(face.labels)) {
    throw Error(ErrorKind::kDimensionMismatch, "face '" + face.id + "' image and labels differ in size");
  }
  AugmentedSample out;
  out.image = face.image;
  out.labels = face.labels;
  out.provenance.face_id = face.id;
  out.provenance.asset_id = asset.id;
  out.provenance.kind = asset.kind;
  return out;
}

}  // namespace

Point2 Placement::apply(Point2 src) const {
  const double c = std::cos(rotation_deg * kDegToRad), s = std::sin(rotation_deg * kDegToRad);
  return {scale * (c * src.x - s * src.y) + translation.x,
          scale * (s * src.x + c * src.y) + translation.y};
}

Point2 Placement::invert(Point2 dst) const {
  const double c = std::cos(rotation_deg * kDegToRad), s = std::sin(rotation_deg * kDegToRad);
  const double x = dst.x - translation.x, y = dst.y - translation.y;
  return {(c * x + s * y) / scale, (-s * x + c * y) / scale};
}

RgbF alpha_blend(RgbF bottom, RgbaF top, double opacity) {
  const double a = top.a * opacity;
  return {top.r * a + bottom.r * (1 - a), top.g * a + bottom.g * (1 - a),
          top.b * a + bottom.b * (1 - a)};
}

Placement sunglasses_placement(const Landmarks& landmarks, const AssetRecord& asset, double k) {
  if (!asset.anchors.lens_left || !asset.anchors.lens_right) {
    throw Error(ErrorKind::kAssetAnchorMissing, "sunglasses '" + asset.id + "' lacks lens anchors");
  }
  const Point2 lens = sub(*asset.anchors.lens_right, *asset.anchors.lens_left);
  if (!(norm(lens) > 0)) {
    throw Error(ErrorKind::kAssetAnchorMissing, "sunglasses '" + asset.id + "' lens anchors coincide");
  }
  const double iod = interocular_distance(landmarks);
  const Point2 eyes = sub(landmarks.eye_right(), landmarks.eye_left());
  return anchored(k * iod / norm(lens), angle_of(eyes) - angle_of(lens),
                  midpoint(*asset.anchors.lens_left, *asset.anchors.lens_right),
                  midpoint(landmarks.eye_left(), landmarks.eye_right()), kSunglassesOpacity);
}

Placement mouth_mask_placement(const Landmarks& landmarks, const AssetRecord& asset) {
  if (!asset.anchors.top_center || !asset.anchors.bottom_center) {
    throw Error(ErrorKind::kAssetAnchorMissing, "mouth mask '" + asset.id + "' lacks top/bottom anchors");
  }
  const Point2 span = sub(*asset.anchors.bottom_center, *asset.anchors.top_center);
  if (!(norm(span) > 0)) {
    throw Error(ErrorKind::kAssetAnchorMissing, "mouth mask '" + asset.id + "' anchors coincide");
  }
  const double iod = interocular_distance(landmarks);
  const Point2 eyes = sub(landmarks.eye_right(), landmarks.eye_left());
  const Point2 down{-eyes.y, eyes.x};
  const Point2 bridge = midpoint(midpoint(landmarks.eye_left(), landmarks.eye_right()),
                                 landmarks.nose_tip());
  return anchored(kMaskHeightPerInterocular * iod / norm(span), angle_of(down) - angle_of(span),
                  *asset.anchors.top_center, bridge, 1.0);
}

Placement hand_placement(const Landmarks& target, const AssetRecord& hand) {
  if (!hand.source_face) {
    throw Error(ErrorKind::kMissingSourceFace, "hand '" + hand.id + "' has no source face");
  }
  if (!(hand.source_face->size > 0)) {
    throw Error(ErrorKind::kMissingSourceFace, "hand '" + hand.id + "' source face size must be positive");
  }
  const FaceFrame frame = face_frame(target);
  return anchored(frame.size / hand.source_face->size, 0.0, hand.source_face->center, frame.center, 1.0);
}

void composite(RgbImage& image, LabelMap& labels, const Image<RgbaF>& asset,
               const Placement& placement, ClassId label) {
  if (!image.same_shape(labels)) {
    throw Error(ErrorKind::kDimensionMismatch, "image and label map differ in size");
  }
  if (asset.empty() || !(placement.scale > 0)) return;
  const int aw = asset.width(), ah = asset.height();

  // Bilinear support of the asset is the open box (-1, aw) x (-1, ah).
  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  for (Point2 corner : {Point2{-1, -1}, Point2{double(aw), -1}, Point2{-1, double(ah)},
                        Point2{double(aw), double(ah)}}) {
    const Point2 d = placement.apply(corner);
    min_x = std::min(min_x, d.x);
    min_y = std::min(min_y, d.y);
    max_x = std::max(max_x, d.x);
    max_y = std::max(max_y, d.y);
  }
  const int x0 = std::max(0, static_cast<int>(std::floor(min_x)));
  const int y0 = std::max(0, static_cast<int>(std::floor(min_y)));
  const int x1 = std::min(image.width() - 1, static_cast<int>(std::ceil(max_x)));
  const int y1 = std::min(image.height() - 1, static_cast<int>(std::ceil(max_y)));

  auto texel = [&](int x, int y) -> RgbaF {
    if (x < 0 || y < 0 || x >= aw || y >= ah) return {};
    return asset.at(x, y);
  };

  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Point2 src = placement.invert({double(x), double(y)});
      if (!(src.x > -1 && src.y > -1 && src.x < aw && src.y < ah)) continue;

      const int ix = static_cast<int>(std::floor(src.x));
      const int iy = static_cast<int>(std::floor(src.y));
      const double fx = src.x - ix, fy = src.y - iy;
      double a = 0, pr = 0, pg = 0, pb = 0;
      const struct { int dx, dy; double w; } taps[4] = {{0, 0, (1 - fx) * (1 - fy)},
                                                         {1, 0, fx * (1 - fy)},
                                                         {0, 1, (1 - fx) * fy},
                                                         {1, 1, fx * fy}};
      for (const auto& t : taps) {
        const RgbaF s = texel(ix + t.dx, iy + t.dy);
        const double wa = t.w * s.a;
        a += wa;
        pr += wa * s.r;
        pg += wa * s.g;
        pb += wa * s.b;
      }
      if (a > 0) {
        const RgbaF top{pr / a, pg / a, pb / a, std::min(a, 1.0)};
        const RgbF out = alpha_blend(faceseg::to_float(image.at(x, y)), top, placement.opacity);
        image.at(x, y) = {quantize(out.r), quantize(out.g), quantize(out.b)};
      }

      const int nx = static_cast<int>(std::lround(src.x));
      const int ny = static_cast<int>(std::lround(src.y));
      if (nx >= 0 && ny >= 0 && nx < aw && ny < ah && asset.at(nx, ny).a >= kLabelAlphaThreshold) {
        labels.at(x, y) = label;
      }
    }
  }
}

Image<RgbaF> to_float(const RgbaImage& rgba) {
  Image<RgbaF> out(rgba.width(), rgba.height());
  for (std::size_t i = 0; i < rgba.size(); ++i) {
    const Rgba8 p = rgba.data()[i];
    out.data()[i] = {p.r / 255.0, p.g / 255.0, p.b / 255.0, p.a / 255.0};
  }
  return out;
}

ColorStats hand_skin_stats(const RgbaImage& hand) {
  std::vector<LabTriple> values;
  for (const Rgba8& p : hand.data()) {
    if (p.a / 255.0 >= kLabelAlphaThreshold) values.push_back(rgb_to_lab(faceseg::to_float(Rgb8{p.r, p.g, p.b})));
  }
  return lab_stats(values);
}

Image<RgbaF> recolor_hand(const RgbaImage& hand, const ColorStats& tone) {
  const ColorStats src = hand_skin_stats(hand);
  std::vector<RgbF> pixels;
  pixels.reserve(hand.size());
  for (const Rgba8& p : hand.data()) pixels.push_back(faceseg::to_float(Rgb8{p.r, p.g, p.b}));
  const auto moved = transfer_color(pixels, src, tone);
  Image<RgbaF> out(hand.width(), hand.height());
  for (std::size_t i = 0; i < hand.size(); ++i) {
    out.data()[i] = {moved[i].r, moved[i].g, moved[i].b, hand.data()[i].a / 255.0};
  }
  return out;
}

ColorStats face_tone(const RgbImage& image, const Landmarks& landmarks) {
  return rect_stats(image, face_tone_region(landmarks, image.width(), image.height()));
}

AugmentedSample place_sunglasses(const FaceSample& face, const AssetImage& asset, double k) {
  require_kind(asset.record, AssetKind::kSunglasses);
  const Placement placement = sunglasses_placement(require_landmarks(face), asset.record, k);
  AugmentedSample out = start_sample(face, asset.record);
  composite(out.image, out.labels, to_float(asset.rgba), placement, ClassId::kSunglasses);
  out.provenance.placement = placement;
  return out;
}

AugmentedSample place_mouth_mask(const FaceSample& face, const AssetImage& asset) {
  require_kind(asset.record, AssetKind::kMouthMask);
  const Placement placement = mouth_mask_placement(require_landmarks(face), asset.record);
  AugmentedSample out = start_sample(face, asset.record);
  composite(out.image, out.labels, to_float(asset.rgba), placement, ClassId::kMouthMask);
  out.provenance.placement = placement;
  return out;
}

AugmentedSample place_hand(const FaceSample& target, const AssetImage& hand, const ColorStats& tone) {
  require_kind(hand.record, AssetKind::kHand);
  const Placement placement = hand_placement(require_landmarks(target), hand.record);
  AugmentedSample out = start_sample(target, hand.record);
  composite(out.image, out.labels, recolor_hand(hand.rgba, tone), placement, ClassId::kBackground);
  out.provenance.placement = placement;
  return out;
}

}  // namespace faceseg
