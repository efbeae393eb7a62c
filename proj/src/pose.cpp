#include "faceseg/pose.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace faceseg {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr int kMaxIterations = 200;

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Residuals = Eigen::Matrix<double, 12, 1>;
using Jacobian = Eigen::Matrix<double, 12, 6>;

Eigen::Matrix3d rotation_matrix(double elevation_rad, double azimuth_rad, double rotation_rad) {
  const Eigen::Matrix3d rx = Eigen::AngleAxisd(elevation_rad, Eigen::Vector3d::UnitX()).toRotationMatrix();
  const Eigen::Matrix3d ry = Eigen::AngleAxisd(azimuth_rad, Eigen::Vector3d::UnitY()).toRotationMatrix();
  const Eigen::Matrix3d rz = Eigen::AngleAxisd(rotation_rad, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  return rz * ry * rx;
}

HeadPose decompose(const Eigen::Matrix3d& r) {
  const double azimuth = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double elevation = std::atan2(r(2, 1), r(2, 2));
  const double rotation = std::atan2(r(1, 0), r(0, 0));
  return {elevation * kRadToDeg, azimuth * kRadToDeg, rotation * kRadToDeg};
}

Residuals residuals(const Vec6& p, const std::array<Point2, 6>& observed, const Camera& camera) {
  const Eigen::Matrix3d r = rotation_matrix(p[0], p[1], p[2]);
  const Eigen::Vector3d t(p[3], p[4], p[5]);
  const auto& model = canonical_head_model();
  Residuals out;
  for (int i = 0; i < 6; ++i) {
    const Eigen::Vector3d x = r * Eigen::Vector3d(model[i][0], model[i][1], model[i][2]) + t;
    out[2 * i] = camera.focal * x.x() / x.z() + camera.cx - observed[i].x;
    out[2 * i + 1] = camera.focal * x.y() / x.z() + camera.cy - observed[i].y;
  }
  return out;
}

void check_not_collinear(const std::array<Point2, 6>& pts) {
  double mx = 0, my = 0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= 6;
  my /= 6;
  double sxx = 0, syy = 0, sxy = 0;
  for (const auto& p : pts) {
    sxx += (p.x - mx) * (p.x - mx);
    syy += (p.y - my) * (p.y - my);
    sxy += (p.x - mx) * (p.y - my);
  }
  const double trace = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  // Smallest eigenvalue of the scatter matrix relative to the largest.
  const double disc = std::sqrt(std::max(0.0, trace * trace / 4 - det));
  const double hi = trace / 2 + disc;
  const double lo = trace / 2 - disc;
  if (!(hi > 0) || lo / hi < 1e-6) {
    throw Error(ErrorKind::kDegenerateLandmarks, "landmarks are collinear or coincident");
  }
}

}  // namespace

double pose_distance(const HeadPose& a, const HeadPose& b) {
  const double de = a.elevation - b.elevation;
  const double da = a.azimuth - b.azimuth;
  const double dr = a.rotation - b.rotation;
  return std::sqrt(de * de + da * da + dr * dr);
}

std::vector<std::pair<std::size_t, std::size_t>> match_poses(const std::vector<HeadPose>& sources,
                                                             const std::vector<HeadPose>& targets,
                                                             const PoseMatchConfig& cfg) {
  // Sweep over targets sorted by elevation: only |d elevation| < theta can match.
  std::vector<std::size_t> order(targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return targets[a].elevation < targets[b].elevation;
  });
  std::vector<double> keys(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) keys[i] = targets[order[i]].elevation;

  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::vector<std::size_t> hits;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const double e = sources[s].elevation;
    auto lo = std::lower_bound(keys.begin(), keys.end(), e - cfg.theta_deg);
    auto hi = std::upper_bound(keys.begin(), keys.end(), e + cfg.theta_deg);
    hits.clear();
    for (auto it = lo; it != hi; ++it) {
      const std::size_t t = order[static_cast<std::size_t>(it - keys.begin())];
      if (pose_distance(sources[s], targets[t]) < cfg.theta_deg) hits.push_back(t);
    }
    std::sort(hits.begin(), hits.end());
    for (std::size_t t : hits) out.emplace_back(s, t);
  }
  return out;
}

const std::array<std::array<double, 3>, 6>& canonical_head_model() {
  static const std::array<std::array<double, 3>, 6> model = {{
      {0.0, 0.0, 0.0},          // nose tip
      {0.0, 330.0, 65.0},       // chin
      {-225.0, -170.0, 135.0},  // outer left eye corner
      {225.0, -170.0, 135.0},   // outer right eye corner
      {-150.0, 150.0, 125.0},   // left mouth corner
      {150.0, 150.0, 125.0},    // right mouth corner
  }};
  return model;
}

std::array<Point2, 6> project_canonical_model(const HeadPose& pose,
                                              const std::array<double, 3>& translation,
                                              const Camera& camera) {
  const Eigen::Matrix3d r = rotation_matrix(pose.elevation * kDegToRad, pose.azimuth * kDegToRad,
                                            pose.rotation * kDegToRad);
  const Eigen::Vector3d t(translation[0], translation[1], translation[2]);
  std::array<Point2, 6> out;
  const auto& model = canonical_head_model();
  for (int i = 0; i < 6; ++i) {
    const Eigen::Vector3d x = r * Eigen::Vector3d(model[i][0], model[i][1], model[i][2]) + t;
    out[i] = {camera.focal * x.x() / x.z() + camera.cx, camera.focal * x.y() / x.z() + camera.cy};
  }
  return out;
}

std::array<Point2, 6> model_correspondences(const Landmarks& landmarks) {
  auto chin = landmarks.chin();
  if (!chin) {
    throw Error(ErrorKind::kDegenerateLandmarks,
                "pose estimation needs six model correspondences; scheme has no chin");
  }
  return {landmarks.nose_tip(), *chin, landmarks.eye_outer_left(), landmarks.eye_outer_right(),
          landmarks.mouth_left(), landmarks.mouth_right()};
}

HeadPose canonicalize(const HeadPose& pose) {
  return decompose(rotation_matrix(pose.elevation * kDegToRad, pose.azimuth * kDegToRad,
                                   pose.rotation * kDegToRad));
}

PoseEstimate estimate_pose(const Landmarks& landmarks, const Camera& camera) {
  if (!(camera.focal > 0)) throw Error(ErrorKind::kDegenerateLandmarks, "focal must be positive");
  const auto observed = model_correspondences(landmarks);
  check_not_collinear(observed);

  const auto& model = canonical_head_model();
  const double model_span = std::hypot(model[3][0] - model[2][0], model[3][1] - model[2][1]);
  const double image_span = distance(observed[2], observed[3]);
  if (!(image_span > 1e-9)) {
    throw Error(ErrorKind::kDegenerateLandmarks, "outer eye corners coincide");
  }

  Vec6 p;
  const double tz = camera.focal * model_span / image_span;
  p << 0, 0, 0, (observed[0].x - camera.cx) * tz / camera.focal,
      (observed[0].y - camera.cy) * tz / camera.focal, tz;

  Residuals r = residuals(p, observed, camera);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  int iteration = 0;
  bool converged = false;

  for (; iteration < kMaxIterations && !converged; ++iteration) {
    Jacobian j;
    for (int k = 0; k < 6; ++k) {
      const double h = (k < 3 ? 1e-6 : 1e-6 * std::max(1.0, std::abs(p[k])));
      Vec6 plus = p, minus = p;
      plus[k] += h;
      minus[k] -= h;
      j.col(k) = (residuals(plus, observed, camera) - residuals(minus, observed, camera)) / (2 * h);
    }
    const Eigen::Matrix<double, 6, 6> jtj = j.transpose() * j;
    const Vec6 gradient = j.transpose() * r;
    if (gradient.lpNorm<Eigen::Infinity>() < 1e-12) {
      converged = true;
      break;
    }

    bool improved = false;
    while (lambda < 1e12) {
      Eigen::Matrix<double, 6, 6> a = jtj;
      for (int k = 0; k < 6; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Vec6 step = a.ldlt().solve(-gradient);
      const Vec6 candidate = p + step;
      if (candidate[5] <= 0) {
        lambda *= 10;
        continue;
      }
      const Residuals rc = residuals(candidate, observed, camera);
      const double candidate_cost = rc.squaredNorm();
      if (std::isfinite(candidate_cost) && candidate_cost <= cost) {
        const double relative_step = step.norm() / (p.norm() + 1e-12);
        const double decrease = cost - candidate_cost;
        p = candidate;
        r = rc;
        cost = candidate_cost;
        lambda = std::max(lambda / 10, 1e-12);
        improved = true;
        if (relative_step < 1e-12 || decrease <= 1e-15 * (cost + 1e-30) || cost < 1e-20) {
          converged = true;
        }
        break;
      }
      lambda *= 10;
    }
    if (!improved) {
      // No descent direction left at any damping: a (local) minimum.
      converged = true;
    }
  }

  if (!converged) {
    throw Error(ErrorKind::kNoConvergence,
                "pose fit did not converge in " + std::to_string(kMaxIterations) + " iterations");
  }

  PoseEstimate out;
  out.pose = decompose(rotation_matrix(p[0], p[1], p[2]));
  out.translation = {p[3], p[4], p[5]};
  out.rms_residual = std::sqrt(cost / 6.0);
  out.iterations = iteration;
  return out;
}

}  // namespace faceseg
