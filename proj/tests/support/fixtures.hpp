#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "faceseg/compositor.hpp"
#include "faceseg/manifest.hpp"

namespace fixtures {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "faceseg");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

struct FaceSpec {
  int width = 250;
  int height = 250;
  faceseg::Point2 center{125, 125};
  double interocular = 60;
  double tilt_deg = 0;
  faceseg::Rgb8 skin{205, 160, 130};
  unsigned noise_seed = 1;
};

// Synthetic face: textured background, skin ellipse with hair cap, five-point
// landmarks consistent with the drawing.
faceseg::FaceSample make_face(const std::string& id, const FaceSpec& spec = {});
faceseg::Landmarks five_point(const FaceSpec& spec);

faceseg::AssetImage make_sunglasses(const std::string& id, double lens_distance = 120);
faceseg::AssetImage make_mouth_mask(const std::string& id);
faceseg::AssetImage make_hand(const std::string& id, const faceseg::HeadPose& pose,
                              faceseg::Point2 source_center = {50, -10}, double source_size = 150);

struct DatasetSpec {
  int faces = 4;
  int sunglasses = 2;
  int masks = 1;
  int hands = 0;
  bool with_poses = false;
  unsigned seed = 7;
};

// Writes faces, labels and assets as PNGs plus manifest.json; returns the
// manifest path.
fs::path write_dataset(const fs::path& root, const DatasetSpec& spec);

// Smooth multi-scale texture with a few hard-edged shapes and sensor noise.
faceseg::RgbImage natural_image(int width, int height, unsigned seed);

// Small random maps for metric and histogram properties.
faceseg::LabelMap random_label_map(std::mt19937_64& gen, int w, int h, int classes = 7);

// Shape-only manifest (no files), for planning and split arithmetic.
faceseg::Manifest synthetic_manifest(std::size_t n, std::size_t sunglasses_tagged = 0,
                                     std::size_t hands_tagged = 0);

}  // namespace fixtures
