#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "faceseg/landmarks.hpp"
#include "faceseg/pose.hpp"

namespace faceseg {

enum class FaceTag { kRealSunglasses, kRealHands, kNewCategory };
enum class Split { kUnassigned, kTrain, kVal };
enum class AssetKind { kSunglasses, kMouthMask, kHand };

std::string_view to_string(FaceTag tag);
std::string_view to_string(Split split);
std::string_view to_string(AssetKind kind);
FaceTag face_tag_from_string(std::string_view s);
Split split_from_string(std::string_view s);
AssetKind asset_kind_from_string(std::string_view s);

struct ImageSize {
  int width = 0;
  int height = 0;
};

struct FaceRecord {
  std::string id;
  std::filesystem::path image_path;
  std::optional<std::filesystem::path> label_path;
  std::optional<Landmarks> landmarks;
  std::optional<HeadPose> pose;
  std::optional<ImageSize> image_size;
  std::set<FaceTag> tags;
  Split split = Split::kUnassigned;

  bool has_tag(FaceTag tag) const { return tags.contains(tag); }
};

struct SourceFace {
  Point2 center;
  double size = 0;
  HeadPose pose;
};

struct AssetAnchors {
  std::optional<Point2> lens_left;
  std::optional<Point2> lens_right;
  std::optional<Point2> top_center;
  std::optional<Point2> bottom_center;
};

struct AssetRecord {
  std::string id;
  AssetKind kind = AssetKind::kSunglasses;
  std::filesystem::path rgba_path;
  AssetAnchors anchors;
  std::optional<SourceFace> source_face;  // required iff kind == hand
};

inline constexpr int kManifestSchemaVersion = 1;

struct Manifest {
  std::vector<FaceRecord> records;
  std::vector<AssetRecord> assets;
  // Relative paths resolve against this directory.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::filesystem::path& p) const {
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  }
  const FaceRecord* find_record(std::string_view id) const;
  const AssetRecord* find_asset(std::string_view id) const;
};

struct ManifestSummary {
  std::size_t total_records = 0;
  std::size_t records_with_landmarks = 0;
  std::size_t records_with_labels = 0;
  std::map<FaceTag, std::size_t> tag_counts;
  std::map<AssetKind, std::size_t> asset_counts;
  std::vector<std::string> violations;

  bool valid() const { return violations.empty(); }
};

struct ValidateOptions {
  bool check_paths = true;
};

ManifestSummary validate_manifest(const Manifest& manifest, const ValidateOptions& options = {});

// JSON round trip. Sidecar files referenced by path are read at load time;
// save writes landmarks and asset metadata inline.
Manifest manifest_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
nlohmann::json manifest_to_json(const Manifest& manifest);
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

// Sidecar formats.
nlohmann::json landmarks_to_json(const Landmarks& landmarks);
Landmarks landmarks_from_json(const nlohmann::json& j);
nlohmann::json pose_to_json(const HeadPose& pose);
HeadPose pose_from_json(const nlohmann::json& j);
nlohmann::json asset_meta_to_json(const AssetRecord& asset);
void apply_asset_meta(const nlohmann::json& meta, AssetRecord& asset);

// Scans `<root>/{sunglasses,mouth-masks,hands}/<id>.png` with `<id>.meta.json` sidecars.
std::vector<AssetRecord> scan_asset_directory(const std::filesystem::path& root);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace faceseg
