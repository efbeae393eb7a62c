#include "faceseg/planning.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "faceseg/rng.hpp"

namespace faceseg {
namespace {

using nlohmann::json;

std::int64_t to_micro(double v) { return std::llround(v * 1e6); }

// Endless draw order over `items`: a fresh shuffle every time the list is exhausted.
template <typename T>
class ShuffledCycle {
 public:
  ShuffledCycle(std::vector<T> items, Rng rng) : items_(std::move(items)), rng_(std::move(rng)) {}

  const T& next() {
    if (pos_ == 0) rng_.shuffle(items_);
    const T& v = items_[pos_];
    pos_ = (pos_ + 1) % items_.size();
    return v;
  }

 private:
  std::vector<T> items_;
  Rng rng_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t augmentation_job_count(double sigma, std::size_t base_size) {
  if (!(sigma >= 0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::kInvalidManifest, "sigma must be a finite value >= 0");
  }
  const auto micro = static_cast<std::uint64_t>(to_micro(sigma));
  return static_cast<std::size_t>((micro * base_size + 500000) / 1000000);
}

std::vector<std::size_t> split_evenly(std::size_t total, std::size_t parts) {
  if (parts == 0) return {};
  std::vector<std::size_t> out(parts, total / parts);
  for (std::size_t i = 0; i < total % parts; ++i) ++out[i];
  return out;
}

std::optional<HeadPose> resolve_pose(const FaceRecord& record, const Camera& camera) {
  if (record.pose) return record.pose;
  if (!record.landmarks) return std::nullopt;
  Camera cam = camera;
  if (record.image_size) {
    cam.cx = record.image_size->width / 2.0;
    cam.cy = record.image_size->height / 2.0;
  }
  try {
    return estimate_pose(*record.landmarks, cam).pose;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::vector<std::pair<std::size_t, std::size_t>> hand_matches(const Manifest& manifest,
                                                             const PoseMatchConfig& cfg,
                                                             const Camera& camera) {
  std::vector<HeadPose> face_poses;
  std::vector<std::size_t> face_index;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    if (!manifest.records[i].landmarks) continue;
    if (auto pose = resolve_pose(manifest.records[i], camera)) {
      face_poses.push_back(*pose);
      face_index.push_back(i);
    }
  }
  std::vector<HeadPose> hand_poses;
  std::vector<std::size_t> hand_index;
  for (std::size_t i = 0; i < manifest.assets.size(); ++i) {
    const auto& a = manifest.assets[i];
    if (a.kind == AssetKind::kHand && a.source_face) {
      hand_poses.push_back(a.source_face->pose);
      hand_index.push_back(i);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (auto [f, h] : match_poses(face_poses, hand_poses, cfg)) {
    out.emplace_back(face_index[f], hand_index[h]);
  }
  return out;
}

AugmentationPlan plan_augmentation(const Manifest& manifest, const PlanRequest& request) {
  AugmentationPlan plan;
  plan.sigma = request.sigma;
  plan.types = request.types;
  plan.seed = request.seed;
  plan.base_size = request.base_size.value_or(manifest.records.size());
  plan.theta_deg = request.match.theta_deg;

  const std::size_t total = augmentation_job_count(request.sigma, plan.base_size);
  if (total > 0 && request.types.empty()) {
    throw Error(ErrorKind::kNoEligibleFaces, "no augmentation types requested");
  }
  const auto quotas = split_evenly(total, request.types.size());

  for (std::size_t t = 0; t < request.types.size(); ++t) {
    const AssetKind type = request.types[t];
    const std::size_t quota = quotas[t];
    if (quota == 0) continue;
    const std::string type_name(to_string(type));

    if (type == AssetKind::kHand) {
      auto pairs = hand_matches(manifest, request.match, request.camera);
      if (pairs.empty()) {
        throw Error(ErrorKind::kNoEligibleFaces, "no pose-matched (face, hand) pairs");
      }
      ShuffledCycle cycle(std::move(pairs), Rng(request.seed, "plan/" + type_name + "/pairs"));
      for (std::size_t i = 0; i < quota; ++i) {
        const auto& [face, hand] = cycle.next();
        plan.jobs.push_back({manifest.records[face].id, manifest.assets[hand].id, type});
      }
      continue;
    }

    std::vector<std::size_t> faces, assets;
    for (std::size_t i = 0; i < manifest.records.size(); ++i) {
      if (manifest.records[i].landmarks) faces.push_back(i);
    }
    for (std::size_t i = 0; i < manifest.assets.size(); ++i) {
      if (manifest.assets[i].kind == type) assets.push_back(i);
    }
    if (faces.empty()) {
      throw Error(ErrorKind::kNoEligibleFaces, "no faces with landmarks for " + type_name);
    }
    if (assets.empty()) {
      throw Error(ErrorKind::kNoEligibleFaces, "no " + type_name + " assets in the manifest");
    }
    ShuffledCycle face_cycle(std::move(faces), Rng(request.seed, "plan/" + type_name + "/faces"));
    ShuffledCycle asset_cycle(std::move(assets), Rng(request.seed, "plan/" + type_name + "/assets"));
    for (std::size_t i = 0; i < quota; ++i) {
      const std::size_t face = face_cycle.next();
      const std::size_t asset = asset_cycle.next();
      plan.jobs.push_back({manifest.records[face].id, manifest.assets[asset].id, type});
    }
  }
  return plan;
}

json plan_to_json(const AugmentationPlan& plan) {
  json types = json::array();
  for (auto t : plan.types) types.push_back(std::string(to_string(t)));
  json jobs = json::array();
  for (const auto& j : plan.jobs) {
    jobs.push_back({{"face_id", j.face_id}, {"asset_id", j.asset_id},
                    {"type", std::string(to_string(j.type))}});
  }
  return {{"sigma", plan.sigma},       {"types", types}, {"seed", plan.seed},
          {"base_size", plan.base_size}, {"theta_deg", plan.theta_deg}, {"jobs", jobs}};
}

AugmentationPlan plan_from_json(const json& j) {
  AugmentationPlan plan;
  plan.sigma = j.at("sigma").get<double>();
  for (const auto& t : j.at("types")) plan.types.push_back(asset_kind_from_string(t.get<std::string>()));
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.base_size = j.at("base_size").get<std::size_t>();
  plan.theta_deg = j.value("theta_deg", 5.0);
  for (const auto& job : j.at("jobs")) {
    plan.jobs.push_back({job.at("face_id").get<std::string>(), job.at("asset_id").get<std::string>(),
                         asset_kind_from_string(job.at("type").get<std::string>())});
  }
  return plan;
}

std::size_t validation_size(double val_fraction, std::size_t n) {
  if (!(val_fraction > 0 && val_fraction < 1)) {
    throw Error(ErrorKind::kUnsatisfiableConstraint, "val_fraction must lie in (0, 1)");
  }
  const auto micro = static_cast<std::uint64_t>(to_micro(val_fraction));
  return static_cast<std::size_t>((micro * n + 999999) / 1000000);
}

Manifest make_split(const Manifest& manifest, const SplitSpec& spec) {
  Manifest out = manifest;
  const std::size_t n = out.records.size();
  const std::size_t val_size = validation_size(spec.val_fraction, n);
  std::vector<bool> in_val(n, false);
  std::size_t val_count = 0;

  std::set<FaceTag> constrained;
  for (const auto& c : spec.constraints) constrained.insert(c.tag);
  auto other_constrained = [&](const FaceRecord& r, FaceTag own) {
    return std::any_of(constrained.begin(), constrained.end(),
                       [&](FaceTag t) { return t != own && r.has_tag(t); });
  };

  for (const auto& c : spec.constraints) {
    const std::string tag_name(to_string(c.tag));
    std::vector<std::size_t> tagged, candidates;
    std::size_t already = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!out.records[i].has_tag(c.tag)) continue;
      tagged.push_back(i);
      if (in_val[i]) ++already;
      else if (!other_constrained(out.records[i], c.tag)) candidates.push_back(i);
    }
    const std::size_t want = c.count_to_val.value_or(tagged.size() / 2);
    if (want > tagged.size()) {
      throw Error(ErrorKind::kUnsatisfiableConstraint,
                  "constraint asks for " + std::to_string(want) + " '" + tag_name +
                      "' records but only " + std::to_string(tagged.size()) + " exist");
    }
    if (already > want || want - already > candidates.size()) {
      throw Error(ErrorKind::kUnsatisfiableConstraint,
                  "cannot place exactly " + std::to_string(want) + " '" + tag_name +
                      "' records in validation");
    }
    Rng rng(spec.seed, "split/" + tag_name);
    rng.shuffle(candidates);
    for (std::size_t k = 0; k < want - already; ++k) {
      in_val[candidates[k]] = true;
      ++val_count;
    }
  }
  if (val_count > val_size) {
    throw Error(ErrorKind::kUnsatisfiableConstraint,
                "constrained records exceed the validation size " + std::to_string(val_size));
  }

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_val[i]) continue;
    const bool carries = std::any_of(constrained.begin(), constrained.end(),
                                     [&](FaceTag t) { return out.records[i].has_tag(t); });
    if (!carries) pool.push_back(i);
  }
  const std::size_t remaining = val_size - val_count;
  if (remaining > pool.size()) {
    throw Error(ErrorKind::kUnsatisfiableConstraint,
                "not enough unconstrained records to fill the validation set");
  }
  Rng rng(spec.seed, "split/fill");
  rng.shuffle(pool);
  for (std::size_t k = 0; k < remaining; ++k) in_val[pool[k]] = true;

  for (std::size_t i = 0; i < n; ++i) out.records[i].split = in_val[i] ? Split::kVal : Split::kTrain;
  return out;
}

json split_to_json(const Manifest& manifest) {
  json assignments = json::object();
  std::size_t val = 0;
  for (const auto& r : manifest.records) {
    assignments[r.id] = std::string(to_string(r.split));
    if (r.split == Split::kVal) ++val;
  }
  return {{"val_count", val},
          {"train_count", manifest.records.size() - val},
          {"assignments", assignments}};
}

ClassStats class_stats(std::span<const LabelMap> maps) {
  ClassStats stats{};
  if (maps.empty()) return stats;
  std::array<std::vector<double>, kNumClasses> areas;
  for (const auto& map : maps) {
    const auto hist = class_histogram(map);
    const double total = static_cast<double>(map.size());
    for (int c = 0; c < kNumClasses; ++c) {
      if (hist[c] > 0) areas[c].push_back(static_cast<double>(hist[c]) / total);
    }
  }
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& a = areas[c];
    stats[c].appearance_frequency = static_cast<double>(a.size()) / static_cast<double>(maps.size());
    if (a.empty()) continue;
    double mean = 0;
    for (double v : a) mean += v;
    mean /= static_cast<double>(a.size());
    double var = 0;
    for (double v : a) var += (v - mean) * (v - mean);
    stats[c].area_mean = mean;
    stats[c].area_std = std::sqrt(var / static_cast<double>(a.size()));
  }
  return stats;
}

std::string class_stats_csv(const ClassStats& stats) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(6);
  out << "class_id,class,appearance_frequency,area_mean,area_std\n";
  for (int c = 0; c < kNumClasses; ++c) {
    out << c << ',' << class_name(static_cast<ClassId>(c)) << ',' << stats[c].appearance_frequency
        << ',';
    if (stats[c].area_mean) out << *stats[c].area_mean;
    out << ',';
    if (stats[c].area_std) out << *stats[c].area_std;
    out << '\n';
  }
  return out.str();
}

HandUsageHistogram hand_usage_histogram(std::span<const std::pair<std::size_t, std::size_t>> matches) {
  std::map<std::size_t, std::set<std::size_t>> hands_per_face;
  for (const auto& [face, hand] : matches) hands_per_face[face].insert(hand);
  HandUsageHistogram histogram;
  for (const auto& [face, hands] : hands_per_face) ++histogram[hands.size()];
  return histogram;
}

HandUsageHistogram hand_usage_histogram(const AugmentationPlan& plan) {
  std::map<std::string, std::set<std::string>> hands_per_face;
  for (const auto& job : plan.jobs) {
    if (job.type == AssetKind::kHand) hands_per_face[job.face_id].insert(job.asset_id);
  }
  HandUsageHistogram histogram;
  for (const auto& [face, hands] : hands_per_face) ++histogram[hands.size()];
  return histogram;
}

std::size_t total_cases(const HandUsageHistogram& histogram) {
  std::size_t total = 0;
  for (const auto& [bin, count] : histogram) total += bin * count;
  return total;
}

}  // namespace faceseg
