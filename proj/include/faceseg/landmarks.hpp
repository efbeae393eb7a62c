#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "faceseg/image.hpp"

namespace faceseg {

enum class LandmarkScheme {
  // eye_left, eye_right, nose_tip, mouth_left, mouth_right (image left/right)
  kFivePoint,
  // iBUG 300-W ordering
  kSixtyEightPoint,
};

std::string_view to_string(LandmarkScheme scheme);
LandmarkScheme landmark_scheme_from_string(std::string_view name);

// Facial landmarks in image pixel coordinates. Named accessors throw
// DegenerateLandmarks when the point cannot be resolved for the scheme.
class Landmarks {
 public:
  Landmarks(LandmarkScheme scheme, std::vector<Point2> points);

  LandmarkScheme scheme() const { return scheme_; }
  const std::vector<Point2>& points() const { return points_; }

  Point2 eye_left() const;
  Point2 eye_right() const;
  Point2 nose_tip() const;
  Point2 mouth_left() const;
  Point2 mouth_right() const;
  Point2 mouth_center() const;
  std::optional<Point2> chin() const;
  // Outer eye corners; five-point landmarks fall back to the eye centres.
  Point2 eye_outer_left() const;
  Point2 eye_outer_right() const;

  Landmarks translated(double dx, double dy) const;
  Landmarks scaled(double factor) const;

 private:
  Point2 mean_of(int first, int last) const;

  LandmarkScheme scheme_;
  std::vector<Point2> points_;
};

struct FaceFrame {
  Point2 center;
  double size = 0;  // characteristic face scale in px
};

inline constexpr double kFaceSizePerInterocular = 2.5;

double distance(Point2 a, Point2 b);

double interocular_distance(const Landmarks& landmarks);

// Centre = centroid of both eye centres and the mouth centre;
// size = 2.5 x interocular distance.
FaceFrame face_frame(const Landmarks& landmarks);

}  // namespace faceseg
