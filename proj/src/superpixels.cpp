#include "faceseg/superpixels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "faceseg/colorspace.hpp"
#include "faceseg/png_io.hpp"

namespace faceseg {
namespace {

struct Center {
  double l, a, b, x, y;
};

constexpr std::array<std::array<int, 2>, 4> kNeighbours4 = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

// 4-connected components of equal id. Returns component id per pixel.
Image<std::int32_t> label_components(const Image<std::int32_t>& ids, std::vector<int>& sizes,
                                     std::vector<std::int32_t>& owner) {
  const int w = ids.width(), h = ids.height();
  Image<std::int32_t> comp(w, h, -1);
  std::vector<std::pair<int, int>> stack;
  sizes.clear();
  owner.clear();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (comp.at(x, y) >= 0) continue;
      const auto c = static_cast<std::int32_t>(sizes.size());
      const std::int32_t id = ids.at(x, y);
      int size = 0;
      comp.at(x, y) = c;
      stack.assign(1, {x, y});
      while (!stack.empty()) {
        auto [px, py] = stack.back();
        stack.pop_back();
        ++size;
        for (auto [dx, dy] : kNeighbours4) {
          const int nx = px + dx, ny = py + dy;
          if (!comp.contains(nx, ny) || comp.at(nx, ny) >= 0 || ids.at(nx, ny) != id) continue;
          comp.at(nx, ny) = c;
          stack.emplace_back(nx, ny);
        }
      }
      sizes.push_back(size);
      owner.push_back(id);
    }
  }
  return comp;
}

// Keeps the largest component of each id (if not tiny) and merges every other
// component into the largest adjacent kept segment.
Image<std::int32_t> enforce_connectivity(const Image<std::int32_t>& ids, int min_size) {
  std::vector<int> sizes;
  std::vector<std::int32_t> owner;
  const Image<std::int32_t> comp = label_components(ids, sizes, owner);
  const std::size_t nc = sizes.size();

  std::unordered_map<std::int32_t, std::size_t> largest;
  for (std::size_t c = 0; c < nc; ++c) {
    auto it = largest.find(owner[c]);
    if (it == largest.end() || sizes[c] > sizes[it->second]) largest[owner[c]] = c;
  }
  // Component adjacency.
  std::vector<std::vector<std::size_t>> adjacent(nc);
  for (int y = 0; y < comp.height(); ++y) {
    for (int x = 0; x < comp.width(); ++x) {
      const auto c = static_cast<std::size_t>(comp.at(x, y));
      for (auto [dx, dy] : {std::array<int, 2>{1, 0}, std::array<int, 2>{0, 1}}) {
        const int nx = x + dx, ny = y + dy;
        if (!comp.contains(nx, ny)) continue;
        const auto d = static_cast<std::size_t>(comp.at(nx, ny));
        if (d != c) {
          adjacent[c].push_back(d);
          adjacent[d].push_back(c);
        }
      }
    }
  }

  // resolved[c] = root component c has been merged into (or itself).
  std::vector<std::int64_t> resolved(nc, -1);
  std::vector<std::int64_t> root_size(nc, 0);
  std::size_t kept = 0;
  for (const auto& [id, c] : largest) {
    if (sizes[c] >= min_size) {
      resolved[c] = static_cast<std::int64_t>(c);
      root_size[c] = sizes[c];
      ++kept;
    }
  }
  if (kept == 0) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < nc; ++c) {
      if (sizes[c] > sizes[best]) best = c;
    }
    resolved[best] = static_cast<std::int64_t>(best);
    root_size[best] = sizes[best];
  }

  bool pending = true;
  while (pending) {
    pending = false;
    for (std::size_t c = 0; c < nc; ++c) {
      if (resolved[c] >= 0) continue;
      std::int64_t target = -1;
      for (std::size_t d : adjacent[c]) {
        if (resolved[d] < 0) continue;
        const std::int64_t root = resolved[d];
        if (target < 0 || root_size[root] > root_size[target] ||
            (root_size[root] == root_size[target] && root < target)) {
          target = root;
        }
      }
      if (target < 0) {
        pending = true;
        continue;
      }
      resolved[c] = target;
      root_size[target] += sizes[c];
    }
  }

  Image<std::int32_t> out(ids.width(), ids.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = static_cast<std::int32_t>(resolved[static_cast<std::size_t>(comp.data()[i])]);
  }
  return out;
}

}  // namespace

SuperpixelMap densify(const Image<std::int32_t>& ids) {
  SuperpixelMap out;
  out.segments = Image<std::int32_t>(ids.width(), ids.height());
  std::unordered_map<std::int32_t, std::int32_t> remap;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto [it, inserted] = remap.try_emplace(ids.data()[i], static_cast<std::int32_t>(remap.size()));
    out.segments.data()[i] = it->second;
  }
  out.segment_count = static_cast<int>(remap.size());
  return out;
}

SuperpixelMap slic(const RgbImage& image, const SLICParams& params) {
  if (image.empty()) throw Error(ErrorKind::kDimensionMismatch, "slic needs a non-empty image");
  if (params.k < 1 || !(params.compactness > 0)) {
    throw Error(ErrorKind::kInvalidManifest, "slic needs k >= 1 and compactness > 0");
  }
  const int w = image.width(), h = image.height();
  const double step = std::sqrt(static_cast<double>(w) * h / params.k);

  std::vector<std::array<double, 3>> lab(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) lab[i] = srgb_to_cielab(image.data()[i]);
  auto lab_at = [&](int x, int y) -> const std::array<double, 3>& {
    return lab[static_cast<std::size_t>(y) * w + x];
  };
  auto gradient = [&](int x, int y) {
    if (x < 1 || y < 1 || x >= w - 1 || y >= h - 1) return std::numeric_limits<double>::infinity();
    double g = 0;
    for (int c = 0; c < 3; ++c) {
      const double gx = lab_at(x + 1, y)[c] - lab_at(x - 1, y)[c];
      const double gy = lab_at(x, y + 1)[c] - lab_at(x, y - 1)[c];
      g += gx * gx + gy * gy;
    }
    return g;
  };

  const int nx = std::max(1, static_cast<int>(std::lround(w / step)));
  const int ny = std::max(1, static_cast<int>(std::lround(h / step)));
  std::vector<Center> centers;
  centers.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      // Cell centre in pixel coordinates; kept sub-pixel unless perturbed.
      const double sx = (i + 0.5) * w / nx - 0.5;
      const double sy = (j + 0.5) * h / ny - 0.5;
      const int cx = std::clamp(static_cast<int>(std::lround(sx)), 0, w - 1);
      const int cy = std::clamp(static_cast<int>(std::lround(sy)), 0, h - 1);
      // Move the seed to the lowest-gradient pixel of its 3x3 neighbourhood.
      double best = gradient(cx, cy);
      int bx = cx, by = cy;
      bool moved = false;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const double g = gradient(cx + dx, cy + dy);
          if (g < best) {
            best = g;
            bx = cx + dx;
            by = cy + dy;
            moved = true;
          }
        }
      }
      const auto& c = lab_at(bx, by);
      centers.push_back({c[0], c[1], c[2], moved ? double(bx) : sx, moved ? double(by) : sy});
    }
  }

  const double spatial_weight = (params.compactness / step) * (params.compactness / step);
  const int window = static_cast<int>(std::ceil(step));
  Image<std::int32_t> assignment(w, h, 0);
  std::vector<double> best_dist(image.size());

  for (int iter = 0; iter < std::max(1, params.max_iters); ++iter) {
    std::fill(best_dist.begin(), best_dist.end(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const Center& c = centers[k];
      const int x0 = std::max(0, static_cast<int>(c.x) - window);
      const int x1 = std::min(w - 1, static_cast<int>(c.x) + window);
      const int y0 = std::max(0, static_cast<int>(c.y) - window);
      const int y1 = std::min(h - 1, static_cast<int>(c.y) + window);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const auto& p = lab_at(x, y);
          const double dc = (p[0] - c.l) * (p[0] - c.l) + (p[1] - c.a) * (p[1] - c.a) +
                            (p[2] - c.b) * (p[2] - c.b);
          const double ds = (x - c.x) * (x - c.x) + (y - c.y) * (y - c.y);
          const double d = dc + ds * spatial_weight;
          const std::size_t idx = static_cast<std::size_t>(y) * w + x;
          if (d < best_dist[idx]) {
            best_dist[idx] = d;
            assignment.data()[idx] = static_cast<std::int32_t>(k);
          }
        }
      }
    }
    // Pixels outside every window keep the nearest-center-by-space fallback.
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t idx = static_cast<std::size_t>(y) * w + x;
        if (std::isfinite(best_dist[idx])) continue;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < centers.size(); ++k) {
          const double ds = (x - centers[k].x) * (x - centers[k].x) + (y - centers[k].y) * (y - centers[k].y);
          if (ds < best) {
            best = ds;
            assignment.data()[idx] = static_cast<std::int32_t>(k);
          }
        }
      }
    }

    std::vector<Center> sums(centers.size(), Center{0, 0, 0, 0, 0});
    std::vector<int> counts(centers.size(), 0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const auto k = static_cast<std::size_t>(assignment.at(x, y));
        const auto& p = lab_at(x, y);
        sums[k].l += p[0];
        sums[k].a += p[1];
        sums[k].b += p[2];
        sums[k].x += x;
        sums[k].y += y;
        ++counts[k];
      }
    }
    for (std::size_t k = 0; k < centers.size(); ++k) {
      if (counts[k] == 0) continue;
      const double n = counts[k];
      centers[k] = {sums[k].l / n, sums[k].a / n, sums[k].b / n, sums[k].x / n, sums[k].y / n};
    }
  }

  const int min_size = std::max(1, static_cast<int>(step * step / 4));
  return densify(enforce_connectivity(assignment, min_size));
}

SuperpixelMap decode_segments(const std::vector<std::uint8_t>& png_bytes) {
  png::Decoded d;
  try {
    d = png::decode(png_bytes);
  } catch (const Error& e) {
    throw Error(ErrorKind::kMalformedSegmentFile, e.what());
  }
  if (d.channels != 1 || d.bit_depth != 16) {
    throw Error(ErrorKind::kMalformedSegmentFile, "segment maps must be 16-bit grayscale PNG");
  }
  Image<std::int32_t> ids(d.width, d.height);
  for (std::size_t i = 0; i < ids.size(); ++i) ids.data()[i] = d.samples16[i];
  return densify(ids);
}

SuperpixelMap load_segments(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = png::read_bytes(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::kMalformedSegmentFile, e.what());
  }
  return decode_segments(bytes);
}

std::vector<std::uint8_t> encode_segments(const SuperpixelMap& map) {
  Image<std::uint16_t> ids(map.width(), map.height());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::int32_t v = map.segments.data()[i];
    if (v < 0 || v > 65535) {
      throw Error(ErrorKind::kMalformedSegmentFile, "segment id " + std::to_string(v) + " does not fit 16 bits");
    }
    ids.data()[i] = static_cast<std::uint16_t>(v);
  }
  return png::encode_gray16(ids);
}

void save_segments(const std::filesystem::path& path, const SuperpixelMap& map) {
  png::write_bytes(path, encode_segments(map));
}

LabelMap rasterize(const SuperpixelMap& segmap, const std::map<int, ClassId>& assignments,
                   ClassId fallback) {
  std::vector<ClassId> lut(static_cast<std::size_t>(segmap.segment_count), fallback);
  for (const auto& [segment, cls] : assignments) {
    if (segment < 0 || segment >= segmap.segment_count) {
      throw Error(ErrorKind::kUnknownSegment, "segment " + std::to_string(segment) + " does not exist");
    }
    lut[static_cast<std::size_t>(segment)] = cls;
  }
  LabelMap out(segmap.width(), segmap.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = lut[static_cast<std::size_t>(segmap.segments.data()[i])];
  }
  return out;
}

Mask boundaries(const SuperpixelMap& segmap) {
  Mask out(segmap.width(), segmap.height(), 0);
  for (int y = 0; y < segmap.height(); ++y) {
    for (int x = 0; x < segmap.width(); ++x) {
      const auto id = segmap.at(x, y);
      const bool right = x + 1 < segmap.width() && segmap.at(x + 1, y) != id;
      const bool below = y + 1 < segmap.height() && segmap.at(x, y + 1) != id;
      if (right || below) out.at(x, y) = 1;
    }
  }
  return out;
}

std::vector<int> component_counts(const SuperpixelMap& segmap) {
  std::vector<int> sizes;
  std::vector<std::int32_t> owner;
  label_components(segmap.segments, sizes, owner);
  std::vector<int> counts(static_cast<std::size_t>(segmap.segment_count), 0);
  for (std::int32_t id : owner) ++counts[static_cast<std::size_t>(id)];
  return counts;
}

}  // namespace faceseg
