#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "faceseg/image.hpp"

namespace faceseg::png {

// Decoded PNG with palette/low-bit-depth expanded. 16-bit samples are stored
// native-endian in `samples16`; 8-bit samples in `samples8`.
struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;   // 1 gray, 2 gray+alpha, 3 rgb, 4 rgba
  int bit_depth = 0;  // 8 or 16
  std::vector<std::uint8_t> samples8;
  std::vector<std::uint16_t> samples16;
};

Decoded decode(const std::vector<std::uint8_t>& bytes);
Decoded read_file(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_rgb(const RgbImage& image);
std::vector<std::uint8_t> encode_rgba(const RgbaImage& image);
std::vector<std::uint8_t> encode_gray8(const Image<std::uint8_t>& image);
std::vector<std::uint8_t> encode_gray16(const Image<std::uint16_t>& image);

RgbImage load_rgb(const std::filesystem::path& path);
RgbaImage load_rgba(const std::filesystem::path& path);

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

void save_rgb(const std::filesystem::path& path, const RgbImage& image);
void save_rgba(const std::filesystem::path& path, const RgbaImage& image);

RgbImage to_rgb(const Decoded& decoded);
RgbaImage to_rgba(const Decoded& decoded);

}  // namespace faceseg::png
