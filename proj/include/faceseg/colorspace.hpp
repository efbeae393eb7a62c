#pragma once

#include <array>
#include <span>
#include <vector>

#include "faceseg/image.hpp"
#include "faceseg/landmarks.hpp"

namespace faceseg {

// Decorrelated log-LMS coordinates (l luminance, alpha yellow-blue, beta red-green).
struct LabTriple {
  double l = 0, alpha = 0, beta = 0;
};

struct ColorStats {
  LabTriple mean;
  LabTriple std;  // population standard deviation per channel
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

// Published RGB->LMS constants before row normalisation.
const Matrix3& reinhard_rgb_to_lms_published();
// Row-normalised RGB->LMS (rows sum to one, so greys map to equal LMS) and its inverse.
const Matrix3& rgb_to_lms_matrix();
const Matrix3& lms_to_rgb_matrix();

inline constexpr double kLogFloor = 1e-6;

LabTriple rgb_to_lab(const RgbF& rgb);
RgbF lab_to_rgb(const LabTriple& lab);

ColorStats lab_stats(std::span<const LabTriple> values);

// Throws EmptyRegion when the mask selects fewer than two pixels.
ColorStats masked_stats(const RgbImage& image, const Mask& mask);
ColorStats rect_stats(const RgbImage& image, const Rect& rect);

// Reinhard moment matching in lab, no clamping.
std::vector<LabTriple> transfer_lab(std::span<const LabTriple> values, const ColorStats& src,
                                    const ColorStats& dst);

// transfer_lab followed by conversion back to RGB, clamped to [0, 1].
std::vector<RgbF> transfer_color(std::span<const RgbF> pixels, const ColorStats& src,
                                 const ColorStats& dst);

// Rectangle spanning the eye centres horizontally and the eye line to the
// mouth line vertically, clipped to [0, width) x [0, height).
Rect face_tone_region(const Landmarks& landmarks, int width, int height);

// CIELAB (D65) of an sRGB colour, used by SLIC's colour distance.
std::array<double, 3> srgb_to_cielab(Rgb8 rgb);

}  // namespace faceseg
