#include "faceseg/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

namespace faceseg {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json point_to_json(Point2 p) { return json::array({p.x, p.y}); }

Point2 point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorKind::kInvalidManifest, "expected an [x, y] pair, got " + j.dump());
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string asset_subdir(AssetKind kind) {
  switch (kind) {
    case AssetKind::kSunglasses: return "sunglasses";
    case AssetKind::kMouthMask: return "mouth-masks";
    case AssetKind::kHand: return "hands";
  }
  return "";
}

fs::path sidecar_for(const fs::path& png_path) {
  return png_path.parent_path() / (png_path.stem().string() + ".meta.json");
}

void load_landmark_sidecar(const json& doc, FaceRecord& record) {
  record.landmarks = landmarks_from_json(doc);
  if (doc.contains("pose") && !record.pose) record.pose = pose_from_json(doc.at("pose"));
  if (doc.contains("image_size")) {
    const auto& s = doc.at("image_size");
    record.image_size = ImageSize{s.at(0).get<int>(), s.at(1).get<int>()};
  }
}

}  // namespace

std::string_view to_string(FaceTag tag) {
  switch (tag) {
    case FaceTag::kRealSunglasses: return "real-sunglasses";
    case FaceTag::kRealHands: return "real-hands";
    case FaceTag::kNewCategory: return "new-category";
  }
  return "";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kUnassigned: return "unassigned";
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
  }
  return "";
}

std::string_view to_string(AssetKind kind) {
  switch (kind) {
    case AssetKind::kSunglasses: return "sunglasses";
    case AssetKind::kMouthMask: return "mouth-mask";
    case AssetKind::kHand: return "hand";
  }
  return "";
}

FaceTag face_tag_from_string(std::string_view s) {
  for (FaceTag t : {FaceTag::kRealSunglasses, FaceTag::kRealHands, FaceTag::kNewCategory}) {
    if (to_string(t) == s) return t;
  }
  throw Error(ErrorKind::kInvalidManifest, "unknown tag '" + std::string(s) + "'");
}

Split split_from_string(std::string_view s) {
  for (Split v : {Split::kUnassigned, Split::kTrain, Split::kVal}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorKind::kInvalidManifest, "unknown split '" + std::string(s) + "'");
}

AssetKind asset_kind_from_string(std::string_view s) {
  for (AssetKind k : {AssetKind::kSunglasses, AssetKind::kMouthMask, AssetKind::kHand}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::kInvalidManifest, "unknown asset kind '" + std::string(s) + "'");
}

const FaceRecord* Manifest::find_record(std::string_view id) const {
  auto it = std::find_if(records.begin(), records.end(), [&](const auto& r) { return r.id == id; });
  return it == records.end() ? nullptr : &*it;
}

const AssetRecord* Manifest::find_asset(std::string_view id) const {
  auto it = std::find_if(assets.begin(), assets.end(), [&](const auto& a) { return a.id == id; });
  return it == assets.end() ? nullptr : &*it;
}

ManifestSummary validate_manifest(const Manifest& manifest, const ValidateOptions& options) {
  ManifestSummary summary;
  summary.total_records = manifest.records.size();
  for (FaceTag t : {FaceTag::kRealSunglasses, FaceTag::kRealHands, FaceTag::kNewCategory}) {
    summary.tag_counts[t] = 0;
  }
  for (AssetKind k : {AssetKind::kSunglasses, AssetKind::kMouthMask, AssetKind::kHand}) {
    summary.asset_counts[k] = 0;
  }

  auto violation = [&](std::string message) { summary.violations.push_back(std::move(message)); };

  std::unordered_set<std::string> seen;
  for (const auto& r : manifest.records) {
    if (r.id.empty()) violation("record with empty id");
    if (!seen.insert(r.id).second) violation("duplicate record id '" + r.id + "'");
    for (FaceTag t : r.tags) ++summary.tag_counts[t];
    if (r.landmarks) ++summary.records_with_landmarks;
    if (r.label_path) ++summary.records_with_labels;
    if (options.check_paths) {
      if (!fs::exists(manifest.resolve(r.image_path))) {
        violation("record '" + r.id + "': image not found: " + r.image_path.string());
      }
      if (r.label_path && !fs::exists(manifest.resolve(*r.label_path))) {
        violation("record '" + r.id + "': label map not found: " + r.label_path->string());
      }
    }
    if (r.landmarks && r.image_size) {
      for (const auto& p : r.landmarks->points()) {
        if (p.x < 0 || p.y < 0 || p.x >= r.image_size->width || p.y >= r.image_size->height) {
          violation("record '" + r.id + "': landmark outside image bounds");
          break;
        }
      }
    }
  }

  seen.clear();
  for (const auto& a : manifest.assets) {
    ++summary.asset_counts[a.kind];
    if (a.id.empty()) violation("asset with empty id");
    if (!seen.insert(a.id).second) violation("duplicate asset id '" + a.id + "'");
    if (options.check_paths && !fs::exists(manifest.resolve(a.rgba_path))) {
      violation("asset '" + a.id + "': RGBA file not found: " + a.rgba_path.string());
    }
    switch (a.kind) {
      case AssetKind::kHand:
        if (!a.source_face) violation("hand asset '" + a.id + "' lacks source_face");
        else if (!(a.source_face->size > 0)) violation("hand asset '" + a.id + "' has non-positive source face size");
        break;
      case AssetKind::kSunglasses:
        if (a.source_face) violation("asset '" + a.id + "' carries source_face but is not a hand");
        if (!a.anchors.lens_left || !a.anchors.lens_right) {
          violation("sunglasses asset '" + a.id + "' lacks lens anchors");
        }
        break;
      case AssetKind::kMouthMask:
        if (a.source_face) violation("asset '" + a.id + "' carries source_face but is not a hand");
        if (!a.anchors.top_center || !a.anchors.bottom_center) {
          violation("mouth-mask asset '" + a.id + "' lacks top/bottom anchors");
        }
        break;
    }
  }
  return summary;
}

json landmarks_to_json(const Landmarks& landmarks) {
  json pts = json::array();
  for (const auto& p : landmarks.points()) pts.push_back(point_to_json(p));
  return {{"scheme", std::string(to_string(landmarks.scheme()))}, {"points", pts}};
}

Landmarks landmarks_from_json(const json& j) {
  std::vector<Point2> pts;
  for (const auto& p : j.at("points")) pts.push_back(point_from_json(p));
  return Landmarks(landmark_scheme_from_string(j.at("scheme").get<std::string>()), std::move(pts));
}

json pose_to_json(const HeadPose& pose) {
  return {{"elevation", pose.elevation}, {"azimuth", pose.azimuth}, {"rotation", pose.rotation}};
}

HeadPose pose_from_json(const json& j) {
  HeadPose p{j.at("elevation").get<double>(), j.at("azimuth").get<double>(),
             j.at("rotation").get<double>()};
  if (!std::isfinite(p.elevation) || !std::isfinite(p.azimuth) || !std::isfinite(p.rotation)) {
    throw Error(ErrorKind::kInvalidManifest, "non-finite head pose");
  }
  return p;
}

json asset_meta_to_json(const AssetRecord& asset) {
  json anchors = json::object();
  if (asset.anchors.lens_left) anchors["lens_left"] = point_to_json(*asset.anchors.lens_left);
  if (asset.anchors.lens_right) anchors["lens_right"] = point_to_json(*asset.anchors.lens_right);
  if (asset.anchors.top_center) anchors["top_center"] = point_to_json(*asset.anchors.top_center);
  if (asset.anchors.bottom_center) {
    anchors["bottom_center"] = point_to_json(*asset.anchors.bottom_center);
  }
  json meta = {{"anchors", anchors}};
  if (asset.source_face) {
    meta["source_face"] = {{"center", point_to_json(asset.source_face->center)},
                           {"size", asset.source_face->size},
                           {"pose", pose_to_json(asset.source_face->pose)}};
  }
  return meta;
}

void apply_asset_meta(const json& meta, AssetRecord& asset) {
  if (meta.contains("anchors")) {
    const auto& a = meta.at("anchors");
    if (a.contains("lens_left")) asset.anchors.lens_left = point_from_json(a.at("lens_left"));
    if (a.contains("lens_right")) asset.anchors.lens_right = point_from_json(a.at("lens_right"));
    if (a.contains("top_center")) asset.anchors.top_center = point_from_json(a.at("top_center"));
    if (a.contains("bottom_center")) {
      asset.anchors.bottom_center = point_from_json(a.at("bottom_center"));
    }
  }
  if (meta.contains("source_face")) {
    const auto& s = meta.at("source_face");
    asset.source_face = SourceFace{point_from_json(s.at("center")), s.at("size").get<double>(),
                                   pose_from_json(s.at("pose"))};
  }
}

Manifest manifest_from_json(const json& doc, const fs::path& base_dir) {
  try {
    const int version = doc.value("schema_version", 0);
    if (version != kManifestSchemaVersion) {
      throw Error(ErrorKind::kInvalidManifest,
                  "unsupported schema_version " + std::to_string(version));
    }
    Manifest m;
    m.base_dir = base_dir;
    for (const auto& r : doc.value("records", json::array())) {
      FaceRecord rec;
      rec.id = r.at("id").get<std::string>();
      rec.image_path = r.at("image").get<std::string>();
      if (r.contains("labels") && !r.at("labels").is_null()) {
        rec.label_path = fs::path(r.at("labels").get<std::string>());
      }
      if (r.contains("pose")) rec.pose = pose_from_json(r.at("pose"));
      if (r.contains("landmarks") && !r.at("landmarks").is_null()) {
        const auto& lm = r.at("landmarks");
        if (lm.is_string()) {
          load_landmark_sidecar(read_json_file(m.resolve(lm.get<std::string>())), rec);
        } else {
          load_landmark_sidecar(lm, rec);
        }
      }
      if (r.contains("image_size")) {
        rec.image_size = ImageSize{r.at("image_size").at(0).get<int>(),
                                   r.at("image_size").at(1).get<int>()};
      }
      for (const auto& t : r.value("tags", json::array())) {
        rec.tags.insert(face_tag_from_string(t.get<std::string>()));
      }
      rec.split = split_from_string(r.value("split", std::string("unassigned")));
      m.records.push_back(std::move(rec));
    }
    for (const auto& a : doc.value("assets", json::array())) {
      AssetRecord asset;
      asset.id = a.at("id").get<std::string>();
      asset.kind = asset_kind_from_string(a.at("kind").get<std::string>());
      asset.rgba_path = a.at("rgba").get<std::string>();
      if (a.contains("meta")) {
        apply_asset_meta(read_json_file(m.resolve(a.at("meta").get<std::string>())), asset);
      } else if (a.contains("anchors") || a.contains("source_face")) {
        apply_asset_meta(a, asset);
      } else if (auto sidecar = m.resolve(sidecar_for(asset.rgba_path)); fs::exists(sidecar)) {
        apply_asset_meta(read_json_file(sidecar), asset);
      }
      m.assets.push_back(std::move(asset));
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidManifest, e.what());
  }
}

json manifest_to_json(const Manifest& manifest) {
  json records = json::array();
  for (const auto& r : manifest.records) {
    json j = {{"id", r.id}, {"image", r.image_path.generic_string()}};
    if (r.label_path) j["labels"] = r.label_path->generic_string();
    if (r.landmarks) j["landmarks"] = landmarks_to_json(*r.landmarks);
    if (r.pose) j["pose"] = pose_to_json(*r.pose);
    if (r.image_size) j["image_size"] = {r.image_size->width, r.image_size->height};
    json tags = json::array();
    for (FaceTag t : r.tags) tags.push_back(std::string(to_string(t)));
    j["tags"] = tags;
    j["split"] = std::string(to_string(r.split));
    records.push_back(std::move(j));
  }
  json assets = json::array();
  for (const auto& a : manifest.assets) {
    json j = asset_meta_to_json(a);
    j["id"] = a.id;
    j["kind"] = std::string(to_string(a.kind));
    j["rgba"] = a.rgba_path.generic_string();
    assets.push_back(std::move(j));
  }
  return {{"schema_version", kManifestSchemaVersion}, {"records", records}, {"assets", assets}};
}

Manifest load_manifest(const fs::path& path) {
  return manifest_from_json(read_json_file(path), path.parent_path());
}

void save_manifest(const fs::path& path, const Manifest& manifest) {
  write_json_file(path, manifest_to_json(manifest));
}

std::vector<AssetRecord> scan_asset_directory(const fs::path& root) {
  std::vector<AssetRecord> out;
  for (AssetKind kind : {AssetKind::kSunglasses, AssetKind::kMouthMask, AssetKind::kHand}) {
    const fs::path dir = root / asset_subdir(kind);
    if (!fs::is_directory(dir)) continue;
    std::vector<fs::path> pngs;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".png") pngs.push_back(entry.path());
    }
    std::sort(pngs.begin(), pngs.end());
    for (const auto& p : pngs) {
      AssetRecord asset;
      asset.id = p.stem().string();
      asset.kind = kind;
      asset.rgba_path = p;
      if (fs::exists(sidecar_for(p))) apply_asset_meta(read_json_file(sidecar_for(p)), asset);
      out.push_back(std::move(asset));
    }
  }
  return out;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidManifest, path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace faceseg
