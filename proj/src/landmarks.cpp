#include "faceseg/landmarks.hpp"

#include <cmath>
#include <string>

namespace faceseg {
namespace {

constexpr double kMinInterocular = 1e-9;

int expected_points(LandmarkScheme scheme) {
  return scheme == LandmarkScheme::kFivePoint ? 5 : 68;
}

}  // namespace

std::string_view to_string(LandmarkScheme scheme) {
  return scheme == LandmarkScheme::kFivePoint ? "five-point" : "sixty-eight-point";
}

LandmarkScheme landmark_scheme_from_string(std::string_view name) {
  if (name == "five-point") return LandmarkScheme::kFivePoint;
  if (name == "sixty-eight-point") return LandmarkScheme::kSixtyEightPoint;
  throw Error(ErrorKind::kInvalidManifest, "unknown landmark scheme '" + std::string(name) + "'");
}

Landmarks::Landmarks(LandmarkScheme scheme, std::vector<Point2> points)
    : scheme_(scheme), points_(std::move(points)) {
  if (static_cast<int>(points_.size()) != expected_points(scheme_)) {
    throw Error(ErrorKind::kDegenerateLandmarks,
                std::string(to_string(scheme_)) + " landmarks need " +
                    std::to_string(expected_points(scheme_)) + " points, got " +
                    std::to_string(points_.size()));
  }
  for (const auto& p : points_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::kDegenerateLandmarks, "non-finite landmark coordinate");
    }
  }
}

Point2 Landmarks::mean_of(int first, int last) const {
  Point2 sum;
  for (int i = first; i <= last; ++i) {
    sum.x += points_[i].x;
    sum.y += points_[i].y;
  }
  const double n = last - first + 1;
  return {sum.x / n, sum.y / n};
}

Point2 Landmarks::eye_left() const {
  return scheme_ == LandmarkScheme::kFivePoint ? points_[0] : mean_of(36, 41);
}

Point2 Landmarks::eye_right() const {
  return scheme_ == LandmarkScheme::kFivePoint ? points_[1] : mean_of(42, 47);
}

Point2 Landmarks::nose_tip() const {
  return scheme_ == LandmarkScheme::kFivePoint ? points_[2] : points_[30];
}

Point2 Landmarks::mouth_left() const {
  return scheme_ == LandmarkScheme::kFivePoint ? points_[3] : points_[48];
}

Point2 Landmarks::mouth_right() const {
  return scheme_ == LandmarkScheme::kFivePoint ? points_[4] : points_[54];
}

Point2 Landmarks::mouth_center() const {
  const Point2 l = mouth_left(), r = mouth_right();
  return {(l.x + r.x) / 2, (l.y + r.y) / 2};
}

std::optional<Point2> Landmarks::chin() const {
  if (scheme_ == LandmarkScheme::kFivePoint) return std::nullopt;
  return points_[8];
}

Point2 Landmarks::eye_outer_left() const {
  return scheme_ == LandmarkScheme::kFivePoint ? points_[0] : points_[36];
}

Point2 Landmarks::eye_outer_right() const {
  return scheme_ == LandmarkScheme::kFivePoint ? points_[1] : points_[45];
}

Landmarks Landmarks::translated(double dx, double dy) const {
  auto pts = points_;
  for (auto& p : pts) {
    p.x += dx;
    p.y += dy;
  }
  return Landmarks(scheme_, std::move(pts));
}

Landmarks Landmarks::scaled(double factor) const {
  auto pts = points_;
  for (auto& p : pts) {
    p.x *= factor;
    p.y *= factor;
  }
  return Landmarks(scheme_, std::move(pts));
}

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double interocular_distance(const Landmarks& landmarks) {
  const double d = distance(landmarks.eye_left(), landmarks.eye_right());
  if (!(d > kMinInterocular)) {
    throw Error(ErrorKind::kDegenerateLandmarks, "eye centres coincide");
  }
  return d;
}

FaceFrame face_frame(const Landmarks& landmarks) {
  const double iod = interocular_distance(landmarks);
  const Point2 l = landmarks.eye_left(), r = landmarks.eye_right(), m = landmarks.mouth_center();
  return {{(l.x + r.x + m.x) / 3, (l.y + r.y + m.y) / 3}, kFaceSizePerInterocular * iod};
}

}  // namespace faceseg
