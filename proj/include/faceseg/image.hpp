#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "faceseg/error.hpp"

namespace faceseg {

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

struct Rgba8 {
  std::uint8_t r = 0, g = 0, b = 0, a = 0;
  friend bool operator==(const Rgba8&, const Rgba8&) = default;
};

// Linear-in-file colour, channels nominally in [0, 1].
struct RgbF {
  double r = 0, g = 0, b = 0;
  friend bool operator==(const RgbF&, const RgbF&) = default;
};

struct RgbaF {
  double r = 0, g = 0, b = 0, a = 0;
};

struct Point2 {
  double x = 0, y = 0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct PixelPos {
  int x = 0, y = 0;
  friend auto operator<=>(const PixelPos&, const PixelPos&) = default;
};

// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct Rect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

// Row-major 2-D raster with value semantics.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    if (width < 0 || height < 0) {
      throw Error(ErrorKind::kDimensionMismatch, "negative image dimensions");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  T& at(int x, int y) { return data_[index(x, y)]; }
  const T& at(int x, int y) const { return data_[index(x, y)]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(const auto& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using RgbImage = Image<Rgb8>;
using RgbaImage = Image<Rgba8>;
using Mask = Image<std::uint8_t>;

inline RgbF to_float(Rgb8 p) { return {p.r / 255.0, p.g / 255.0, p.b / 255.0}; }

}  // namespace faceseg
