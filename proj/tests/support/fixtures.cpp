#include "fixtures.hpp"

#include <atomic>
#include <cmath>

#include "faceseg/png_io.hpp"

namespace fixtures {

using namespace faceseg;

namespace {

std::atomic<int> g_counter{0};

Rgb8 clamp8(double r, double g, double b) {
  auto c = [](double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); };
  return {c(r), c(g), c(b)};
}

Point2 rotate(Point2 p, double deg) {
  const double t = deg * M_PI / 180.0;
  return {p.x * std::cos(t) - p.y * std::sin(t), p.x * std::sin(t) + p.y * std::cos(t)};
}

}  // namespace

TempDir::TempDir(const std::string& prefix) {
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          (prefix + "-" + std::to_string(rd()) + "-" + std::to_string(g_counter.fetch_add(1)));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Landmarks five_point(const FaceSpec& s) {
  const double d = s.interocular;
  auto at = [&](double dx, double dy) {
    const Point2 r = rotate({dx, dy}, s.tilt_deg);
    return Point2{s.center.x + r.x, s.center.y + r.y};
  };
  return Landmarks(LandmarkScheme::kFivePoint,
                   {at(-d / 2, -0.25 * d), at(d / 2, -0.25 * d), at(0, 0.2 * d), at(-0.35 * d, 0.6 * d),
                    at(0.35 * d, 0.6 * d)});
}

FaceSample make_face(const std::string& id, const FaceSpec& s) {
  FaceSample f;
  f.id = id;
  f.image = RgbImage(s.width, s.height);
  f.labels = LabelMap(s.width, s.height, ClassId::kBackground);
  std::mt19937 gen(s.noise_seed);
  std::uniform_real_distribution<double> noise(-12, 12);
  const double rx = 0.95 * s.interocular, ry = 1.3 * s.interocular;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      const Point2 local = rotate({x - s.center.x, y - s.center.y}, -s.tilt_deg);
      const double e = (local.x * local.x) / (rx * rx) + (local.y * local.y) / (ry * ry);
      const double n = noise(gen);
      if (e <= 1.0 && local.y < -0.55 * ry) {
        f.image.at(x, y) = clamp8(70 + n, 45 + n, 30 + n);
        f.labels.at(x, y) = ClassId::kHair;
      } else if (e <= 1.0) {
        f.image.at(x, y) = clamp8(s.skin.r + n, s.skin.g + n, s.skin.b + n);
        f.labels.at(x, y) = ClassId::kSkin;
      } else {
        f.image.at(x, y) = clamp8(40 + 0.5 * x + n, 90 + n, 150 - 0.3 * y + n);
      }
    }
  }
  f.landmarks = five_point(s);
  return f;
}

AssetImage make_sunglasses(const std::string& id, double lens_distance) {
  const int w = static_cast<int>(std::lround(lens_distance + 60));
  const int h = 44;
  const double lx = 30, rx = 30 + lens_distance, cy = 22;
  AssetImage a;
  a.record.id = id;
  a.record.kind = AssetKind::kSunglasses;
  a.record.anchors.lens_left = Point2{lx, cy};
  a.record.anchors.lens_right = Point2{rx, cy};
  a.rgba = RgbaImage(w, h, Rgba8{0, 0, 0, 0});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dl = std::hypot((x - lx) / 26.0, (y - cy) / 18.0);
      const double dr = std::hypot((x - rx) / 26.0, (y - cy) / 18.0);
      if (dl <= 1 || dr <= 1) {
        a.rgba.at(x, y) = {20, 20, 30, 255};
      } else if (x > lx && x < rx && std::abs(y - (cy - 6)) <= 2) {
        a.rgba.at(x, y) = {60, 60, 60, 255};
      } else if (dl <= 1.15 || dr <= 1.15) {
        a.rgba.at(x, y) = {30, 30, 40, 100};
      }
    }
  }
  return a;
}

AssetImage make_mouth_mask(const std::string& id) {
  const int w = 120, h = 100;
  AssetImage a;
  a.record.id = id;
  a.record.kind = AssetKind::kMouthMask;
  a.record.anchors.top_center = Point2{60, 4};
  a.record.anchors.bottom_center = Point2{60, 96};
  a.rgba = RgbaImage(w, h, Rgba8{0, 0, 0, 0});
  for (int y = 4; y <= 96; ++y) {
    for (int x = 6; x < w - 6; ++x) {
      const double bulge = std::hypot((x - 60) / 54.0, (y - 50) / 50.0);
      if (bulge <= 1.0) a.rgba.at(x, y) = {170, 200, 235, 255};
      else if (bulge <= 1.05) a.rgba.at(x, y) = {170, 200, 235, 90};
    }
  }
  return a;
}

AssetImage make_hand(const std::string& id, const HeadPose& pose, Point2 source_center, double source_size) {
  const int w = 90, h = 130;
  AssetImage a;
  a.record.id = id;
  a.record.kind = AssetKind::kHand;
  a.record.source_face = SourceFace{source_center, source_size, pose};
  a.rgba = RgbaImage(w, h, Rgba8{0, 0, 0, 0});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool palm = std::hypot((x - 45) / 36.0, (y - 85) / 40.0) <= 1.0;
      bool finger = false;
      for (int f = 0; f < 4; ++f) {
        const int fx = 18 + 18 * f;
        if (std::abs(x - fx) <= 6 && y >= 12 + 4 * std::abs(f - 1.5) && y < 80) finger = true;
      }
      if (palm || finger) {
        const std::uint8_t shade = static_cast<std::uint8_t>(150 + (x * 7 + y * 3) % 40);
        a.rgba.at(x, y) = {shade, static_cast<std::uint8_t>(shade - 45), static_cast<std::uint8_t>(shade - 70), 255};
      }
    }
  }
  return a;
}

fs::path write_dataset(const fs::path& root, const DatasetSpec& spec) {
  fs::create_directories(root);
  std::mt19937 gen(spec.seed);
  std::uniform_real_distribution<double> jitter(-8, 8), tilt(-12, 12), iod(48, 70), angle(-20, 20);
  Manifest m;
  m.base_dir = root;
  for (int i = 0; i < spec.faces; ++i) {
    FaceSpec fs_;
    fs_.center = {125 + jitter(gen), 125 + jitter(gen)};
    fs_.interocular = iod(gen);
    fs_.tilt_deg = tilt(gen);
    fs_.noise_seed = spec.seed * 1000 + i;
    const std::string id = "face" + std::to_string(i);
    const FaceSample f = make_face(id, fs_);
    png::save_rgb(root / "faces" / (id + ".png"), f.image);
    save_label_map(root / "labels" / (id + ".png"), f.labels);
    FaceRecord r;
    r.id = id;
    r.image_path = "faces/" + id + ".png";
    r.label_path = fs::path("labels/" + id + ".png");
    r.landmarks = f.landmarks;
    r.image_size = ImageSize{fs_.width, fs_.height};
    if (spec.with_poses) r.pose = HeadPose{angle(gen) / 4, angle(gen) / 4, fs_.tilt_deg / 4};
    m.records.push_back(std::move(r));
  }
  auto add_asset = [&](AssetImage a, const std::string& dir) {
    a.record.rgba_path = "assets/" + dir + "/" + a.record.id + ".png";
    png::save_rgba(root / a.record.rgba_path, a.rgba);
    m.assets.push_back(a.record);
  };
  for (int i = 0; i < spec.sunglasses; ++i) {
    add_asset(make_sunglasses("sg" + std::to_string(i), 100 + 20 * i), "sunglasses");
  }
  for (int i = 0; i < spec.masks; ++i) add_asset(make_mouth_mask("mask" + std::to_string(i)), "mouth-masks");
  for (int i = 0; i < spec.hands; ++i) {
    add_asset(make_hand("hand" + std::to_string(i), HeadPose{0, 0, 0}, {40.0 - 10 * i, 20}, 140 + 10 * i), "hands");
  }
  const fs::path manifest = root / "manifest.json";
  save_manifest(manifest, m);
  return manifest;
}

RgbImage natural_image(int width, int height, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0, 1);
  struct Wave {
    double fx, fy, phase, amp[3];
  };
  std::vector<Wave> waves;
  for (int i = 0; i < 12; ++i) {
    const double scale = 0.01 + 0.08 * u(gen);
    waves.push_back({scale * (u(gen) - 0.5) * 2 * M_PI, scale * (u(gen) - 0.5) * 2 * M_PI, 2 * M_PI * u(gen),
                     {40 * u(gen), 40 * u(gen), 40 * u(gen)}});
  }
  struct Blob {
    double cx, cy, rx, ry;
    Rgb8 color;
  };
  std::vector<Blob> blobs;
  for (int i = 0; i < 6; ++i) {
    blobs.push_back({width * u(gen), height * u(gen), 6 + 20 * u(gen), 6 + 20 * u(gen),
                     clamp8(255 * u(gen), 255 * u(gen), 255 * u(gen))});
  }
  std::normal_distribution<double> noise(0, 4);
  RgbImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double c[3] = {110 + 0.4 * x, 120, 140 - 0.3 * y};
      for (const auto& w : waves) {
        const double v = std::sin(w.fx * x + w.fy * y + w.phase);
        for (int k = 0; k < 3; ++k) c[k] += w.amp[k] * v;
      }
      Rgb8 px = clamp8(c[0] + noise(gen), c[1] + noise(gen), c[2] + noise(gen));
      for (const auto& b : blobs) {
        if (std::hypot((x - b.cx) / b.rx, (y - b.cy) / b.ry) <= 1) {
          px = clamp8(b.color.r + noise(gen), b.color.g + noise(gen), b.color.b + noise(gen));
        }
      }
      img.at(x, y) = px;
    }
  }
  return img;
}

LabelMap random_label_map(std::mt19937_64& gen, int w, int h, int classes) {
  std::uniform_int_distribution<int> cls(0, classes - 1);
  LabelMap m(w, h);
  for (auto& v : m.data()) v = class_from_index(cls(gen));
  return m;
}

Manifest synthetic_manifest(std::size_t n, std::size_t sunglasses_tagged, std::size_t hands_tagged) {
  Manifest m;
  for (std::size_t i = 0; i < n; ++i) {
    FaceRecord r;
    r.id = "r" + std::to_string(i);
    r.image_path = r.id + ".png";
    r.landmarks = five_point(FaceSpec{});
    if (i < sunglasses_tagged) r.tags.insert(FaceTag::kRealSunglasses);
    else if (i < sunglasses_tagged + hands_tagged) r.tags.insert(FaceTag::kRealHands);
    m.records.push_back(std::move(r));
  }
  return m;
}

}  // namespace fixtures
