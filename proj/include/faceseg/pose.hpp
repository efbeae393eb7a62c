#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "faceseg/landmarks.hpp"

namespace faceseg {

// Head orientation in degrees. Composition is R = Rz(rotation) * Ry(azimuth) * Rx(elevation).
struct HeadPose {
  double elevation = 0;
  double azimuth = 0;
  double rotation = 0;
  friend bool operator==(const HeadPose&, const HeadPose&) = default;
};

struct PoseMatchConfig {
  double theta_deg = 5.0;
};

// Pinhole camera with square pixels.
struct Camera {
  double focal = 250;
  double cx = 125;
  double cy = 125;
};

struct PoseEstimate {
  HeadPose pose;
  std::array<double, 3> translation{};
  double rms_residual = 0;  // px
  int iterations = 0;
};

// L2 norm of the three angle differences, in degrees.
double pose_distance(const HeadPose& a, const HeadPose& b);

// All (source, target) pairs with pose_distance strictly below theta, ordered
// source-major then by target index.
std::vector<std::pair<std::size_t, std::size_t>> match_poses(const std::vector<HeadPose>& sources,
                                                             const std::vector<HeadPose>& targets,
                                                             const PoseMatchConfig& cfg);

// Generic six-point head model in camera convention (x right, y down, z away
// from the camera): nose tip, chin, outer left eye corner, outer right eye
// corner, left mouth corner, right mouth corner.
const std::array<std::array<double, 3>, 6>& canonical_head_model();

std::array<Point2, 6> project_canonical_model(const HeadPose& pose,
                                              const std::array<double, 3>& translation,
                                              const Camera& camera);

// The six image points matching canonical_head_model() order. Throws
// DegenerateLandmarks for schemes that lack a chin.
std::array<Point2, 6> model_correspondences(const Landmarks& landmarks);

// Damped least-squares fit of the canonical model to the landmarks.
// Throws DegenerateLandmarks or NoConvergence.
PoseEstimate estimate_pose(const Landmarks& landmarks, const Camera& camera);

// Wraps rotation into (-180, 180] after canonical Euler decomposition.
HeadPose canonicalize(const HeadPose& pose);

}  // namespace faceseg
