#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "faceseg/classes.hpp"
#include "faceseg/manifest.hpp"
#include "faceseg/pose.hpp"

namespace faceseg {

struct AugmentJob {
  std::string face_id;
  std::string asset_id;
  AssetKind type = AssetKind::kSunglasses;
  friend bool operator==(const AugmentJob&, const AugmentJob&) = default;
};

struct AugmentationPlan {
  double sigma = 0;
  std::vector<AssetKind> types;
  std::uint64_t seed = 0;
  std::size_t base_size = 0;
  double theta_deg = 5.0;
  std::vector<AugmentJob> jobs;
};

struct PlanRequest {
  double sigma = 0;
  std::vector<AssetKind> types;
  std::uint64_t seed = 0;
  // Defaults to the number of manifest records.
  std::optional<std::size_t> base_size;
  PoseMatchConfig match;
  Camera camera;
};

// round-half-up(sigma * n), exact for sigma given to six decimals.
std::size_t augmentation_job_count(double sigma, std::size_t base_size);

// Per-type quotas: equal shares, remainder to the first declared types.
std::vector<std::size_t> split_evenly(std::size_t total, std::size_t parts);

// Head pose of a record: the manifest pose wins, otherwise estimated from
// landmarks. Returns nullopt when neither is available or estimation fails.
std::optional<HeadPose> resolve_pose(const FaceRecord& record, const Camera& camera);

// (record index, hand asset index) pairs whose poses match under cfg.
std::vector<std::pair<std::size_t, std::size_t>> hand_matches(const Manifest& manifest,
                                                             const PoseMatchConfig& cfg,
                                                             const Camera& camera);

// Throws NoEligibleFaces when a requested type has work but no candidates.
AugmentationPlan plan_augmentation(const Manifest& manifest, const PlanRequest& request);

nlohmann::json plan_to_json(const AugmentationPlan& plan);
AugmentationPlan plan_from_json(const nlohmann::json& j);

struct SplitConstraint {
  FaceTag tag;
  std::optional<std::size_t> count_to_val;  // default floor(tagged / 2)
};

struct SplitSpec {
  double val_fraction = 0.10;
  std::vector<SplitConstraint> constraints;
  std::uint64_t seed = 0;
};

std::size_t validation_size(double val_fraction, std::size_t n);

// Throws UnsatisfiableConstraint.
Manifest make_split(const Manifest& manifest, const SplitSpec& spec);
nlohmann::json split_to_json(const Manifest& manifest);

struct ClassStatsEntry {
  double appearance_frequency = 0;
  std::optional<double> area_mean;  // absent when the class never appears
  std::optional<double> area_std;
};

using ClassStats = std::array<ClassStatsEntry, kNumClasses>;

ClassStats class_stats(std::span<const LabelMap> maps);
std::string class_stats_csv(const ClassStats& stats);

// Bin = number of distinct hands matched to a face; value = number of faces.
using HandUsageHistogram = std::map<std::size_t, std::size_t>;

HandUsageHistogram hand_usage_histogram(std::span<const std::pair<std::size_t, std::size_t>> matches);
HandUsageHistogram hand_usage_histogram(const AugmentationPlan& plan);
std::size_t total_cases(const HandUsageHistogram& histogram);

}  // namespace faceseg
