#include "faceseg/colorspace.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace faceseg {
namespace {

const double kInvSqrt3 = 1.0 / std::sqrt(3.0);
const double kInvSqrt6 = 1.0 / std::sqrt(6.0);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

constexpr double kMinStd = 1e-8;

Matrix3 normalise_rows(const Matrix3& m) {
  Matrix3 out = m;
  for (auto& row : out) {
    const double sum = row[0] + row[1] + row[2];
    for (double& v : row) v /= sum;
  }
  return out;
}

Matrix3 invert(const Matrix3& m) {
  Eigen::Matrix3d e;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e(i, j) = m[i][j];
  const Eigen::Matrix3d inv = e.inverse();
  Matrix3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = inv(i, j);
  return out;
}

std::array<double, 3> apply(const Matrix3& m, double a, double b, double c) {
  return {m[0][0] * a + m[0][1] * b + m[0][2] * c, m[1][0] * a + m[1][1] * b + m[1][2] * c,
          m[2][0] * a + m[2][1] * b + m[2][2] * c};
}

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double kDelta = 6.0 / 29.0;
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3 * kDelta * kDelta) + 4.0 / 29.0;
}

}  // namespace

const Matrix3& reinhard_rgb_to_lms_published() {
  static const Matrix3 m = {{{0.3811, 0.5783, 0.0402},
                             {0.1967, 0.7244, 0.0782},
                             {0.0241, 0.1288, 0.8444}}};
  return m;
}

const Matrix3& rgb_to_lms_matrix() {
  static const Matrix3 m = normalise_rows(reinhard_rgb_to_lms_published());
  return m;
}

const Matrix3& lms_to_rgb_matrix() {
  static const Matrix3 m = invert(rgb_to_lms_matrix());
  return m;
}

LabTriple rgb_to_lab(const RgbF& rgb) {
  const auto lms = apply(rgb_to_lms_matrix(), rgb.r, rgb.g, rgb.b);
  const double L = std::log10(std::max(lms[0], kLogFloor));
  const double M = std::log10(std::max(lms[1], kLogFloor));
  const double S = std::log10(std::max(lms[2], kLogFloor));
  return {kInvSqrt3 * (L + M + S), kInvSqrt6 * (L + M - 2 * S), kInvSqrt2 * (L - M)};
}

RgbF lab_to_rgb(const LabTriple& lab) {
  const double a = lab.l * kInvSqrt3;
  const double b = lab.alpha * kInvSqrt6;
  const double c = lab.beta * kInvSqrt2;
  const double L = std::pow(10.0, a + b + c);
  const double M = std::pow(10.0, a + b - c);
  const double S = std::pow(10.0, a - 2 * b);
  const auto rgb = apply(lms_to_rgb_matrix(), L, M, S);
  return {rgb[0], rgb[1], rgb[2]};
}

ColorStats lab_stats(std::span<const LabTriple> values) {
  if (values.size() < 2) {
    throw Error(ErrorKind::kEmptyRegion, "colour statistics need at least two pixels");
  }
  const double n = static_cast<double>(values.size());
  LabTriple mean;
  for (const auto& v : values) {
    mean.l += v.l;
    mean.alpha += v.alpha;
    mean.beta += v.beta;
  }
  mean = {mean.l / n, mean.alpha / n, mean.beta / n};
  LabTriple var;
  for (const auto& v : values) {
    var.l += (v.l - mean.l) * (v.l - mean.l);
    var.alpha += (v.alpha - mean.alpha) * (v.alpha - mean.alpha);
    var.beta += (v.beta - mean.beta) * (v.beta - mean.beta);
  }
  return {mean, {std::sqrt(var.l / n), std::sqrt(var.alpha / n), std::sqrt(var.beta / n)}};
}

ColorStats masked_stats(const RgbImage& image, const Mask& mask) {
  if (!image.same_shape(mask)) {
    throw Error(ErrorKind::kDimensionMismatch, "mask and image dimensions differ");
  }
  std::vector<LabTriple> values;
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (mask.data()[i] != 0) values.push_back(rgb_to_lab(to_float(image.data()[i])));
  }
  return lab_stats(values);
}

ColorStats rect_stats(const RgbImage& image, const Rect& rect) {
  std::vector<LabTriple> values;
  for (int y = std::max(0, rect.y0); y < std::min(image.height(), rect.y1); ++y) {
    for (int x = std::max(0, rect.x0); x < std::min(image.width(), rect.x1); ++x) {
      values.push_back(rgb_to_lab(to_float(image.at(x, y))));
    }
  }
  return lab_stats(values);
}

std::vector<LabTriple> transfer_lab(std::span<const LabTriple> values, const ColorStats& src,
                                    const ColorStats& dst) {
  auto scale = [](double s, double d) { return s < kMinStd ? 0.0 : d / s; };
  const double kl = scale(src.std.l, dst.std.l);
  const double ka = scale(src.std.alpha, dst.std.alpha);
  const double kb = scale(src.std.beta, dst.std.beta);
  std::vector<LabTriple> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    out.push_back({(v.l - src.mean.l) * kl + dst.mean.l,
                   (v.alpha - src.mean.alpha) * ka + dst.mean.alpha,
                   (v.beta - src.mean.beta) * kb + dst.mean.beta});
  }
  return out;
}

std::vector<RgbF> transfer_color(std::span<const RgbF> pixels, const ColorStats& src,
                                 const ColorStats& dst) {
  std::vector<LabTriple> lab;
  lab.reserve(pixels.size());
  for (const auto& p : pixels) lab.push_back(rgb_to_lab(p));
  const auto moved = transfer_lab(lab, src, dst);
  std::vector<RgbF> out;
  out.reserve(moved.size());
  for (const auto& v : moved) {
    const RgbF c = lab_to_rgb(v);
    out.push_back({std::clamp(c.r, 0.0, 1.0), std::clamp(c.g, 0.0, 1.0), std::clamp(c.b, 0.0, 1.0)});
  }
  return out;
}

Rect face_tone_region(const Landmarks& landmarks, int width, int height) {
  const Point2 l = landmarks.eye_left(), r = landmarks.eye_right();
  const Point2 mouth = landmarks.mouth_center();
  const double eye_line = (l.y + r.y) / 2;
  Rect rect{static_cast<int>(std::lround(std::min(l.x, r.x))),
            static_cast<int>(std::lround(std::min(eye_line, mouth.y))),
            static_cast<int>(std::lround(std::max(l.x, r.x))),
            static_cast<int>(std::lround(std::max(eye_line, mouth.y)))};
  if (rect.empty()) {
    throw Error(ErrorKind::kDegenerateLandmarks, "face tone region is empty");
  }
  rect.x0 = std::clamp(rect.x0, 0, width - 1);
  rect.y0 = std::clamp(rect.y0, 0, height - 1);
  rect.x1 = std::clamp(rect.x1, rect.x0 + 1, width);
  rect.y1 = std::clamp(rect.y1, rect.y0 + 1, height);
  if (rect.width() * rect.height() < 2) {
    throw Error(ErrorKind::kDegenerateLandmarks, "face tone region lies outside the image");
  }
  return rect;
}

std::array<double, 3> srgb_to_cielab(Rgb8 rgb) {
  const double r = srgb_to_linear(rgb.r / 255.0);
  const double g = srgb_to_linear(rgb.g / 255.0);
  const double b = srgb_to_linear(rgb.b / 255.0);
  const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.95047;
  const double y = (0.2126729 * r + 0.7151522 * g + 0.0721750 * b);
  const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.08883;
  const double fx = lab_f(x), fy = lab_f(y), fz = lab_f(z);
  return {116 * fy - 16, 500 * (fx - fy), 200 * (fy - fz)};
}

}  // namespace faceseg
