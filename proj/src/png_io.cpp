#include "faceseg/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

namespace faceseg::png {
namespace {

struct ReadCursor {
  const std::vector<std::uint8_t>* bytes;
  std::size_t offset;
};

void read_callback(png_structp png_ptr, png_bytep out, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png_ptr));
  if (cursor->offset + length > cursor->bytes->size()) {
    png_error(png_ptr, "unexpected end of PNG data");
  }
  std::memcpy(out, cursor->bytes->data() + cursor->offset, length);
  cursor->offset += length;
}

void write_callback(png_structp png_ptr, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png_ptr));
  out->insert(out->end(), data, data + length);
}

void flush_callback(png_structp) {}

// libpng reports errors through longjmp; this keeps the message so the
// caller can raise a C++ exception after the jump lands.
struct ErrorSink {
  char message[256] = {0};
};

void error_callback(png_structp png_ptr, png_const_charp msg) {
  auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png_ptr));
  std::strncpy(sink->message, msg, sizeof(sink->message) - 1);
  png_longjmp(png_ptr, 1);
}

void warning_callback(png_structp, png_const_charp) {}

// Runs the libpng read with no non-trivial locals in the setjmp frame.
bool decode_impl(ReadCursor* cursor, Decoded* out, ErrorSink* sink) {
  png_structp png_ptr =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, sink, error_callback, warning_callback);
  if (png_ptr == nullptr) {
    std::strncpy(sink->message, "png_create_read_struct failed", sizeof(sink->message) - 1);
    return false;
  }
  png_infop info_ptr = png_create_info_struct(png_ptr);
  if (info_ptr == nullptr) {
    png_destroy_read_struct(&png_ptr, nullptr, nullptr);
    std::strncpy(sink->message, "png_create_info_struct failed", sizeof(sink->message) - 1);
    return false;
  }
  if (setjmp(png_jmpbuf(png_ptr))) {
    png_destroy_read_struct(&png_ptr, &info_ptr, nullptr);
    return false;
  }
  png_set_read_fn(png_ptr, cursor, read_callback);
  png_read_info(png_ptr, info_ptr);

  const int color_type = png_get_color_type(png_ptr, info_ptr);
  const int bit_depth = png_get_bit_depth(png_ptr, info_ptr);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png_ptr);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png_ptr);
  if (png_get_valid(png_ptr, info_ptr, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png_ptr);
  if (bit_depth == 16) png_set_swap(png_ptr);
  png_read_update_info(png_ptr, info_ptr);

  out->width = static_cast<int>(png_get_image_width(png_ptr, info_ptr));
  out->height = static_cast<int>(png_get_image_height(png_ptr, info_ptr));
  out->channels = png_get_channels(png_ptr, info_ptr);
  out->bit_depth = png_get_bit_depth(png_ptr, info_ptr);
  const std::size_t rowbytes = png_get_rowbytes(png_ptr, info_ptr);
  const std::size_t total = rowbytes * static_cast<std::size_t>(out->height);

  // Storage is sized before reading rows; resize cannot longjmp.
  std::uint8_t* base = nullptr;
  if (out->bit_depth == 16) {
    out->samples16.resize(total / 2);
    base = reinterpret_cast<std::uint8_t*>(out->samples16.data());
  } else {
    out->samples8.resize(total);
    base = out->samples8.data();
  }
  for (int y = 0; y < out->height; ++y) {
    png_read_row(png_ptr, base + rowbytes * static_cast<std::size_t>(y), nullptr);
  }
  png_read_end(png_ptr, nullptr);
  png_destroy_read_struct(&png_ptr, &info_ptr, nullptr);
  return true;
}

bool encode_impl(int width, int height, int color_type, int bit_depth, const std::uint8_t* data,
                 std::size_t rowbytes, std::vector<std::uint8_t>* out, ErrorSink* sink) {
  png_structp png_ptr =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, sink, error_callback, warning_callback);
  if (png_ptr == nullptr) return false;
  png_infop info_ptr = png_create_info_struct(png_ptr);
  if (info_ptr == nullptr) {
    png_destroy_write_struct(&png_ptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png_ptr))) {
    png_destroy_write_struct(&png_ptr, &info_ptr);
    return false;
  }
  png_set_write_fn(png_ptr, out, write_callback, flush_callback);
  png_set_IHDR(png_ptr, info_ptr, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png_ptr, info_ptr);
  if (bit_depth == 16) png_set_swap(png_ptr);
  for (int y = 0; y < height; ++y) {
    png_write_row(png_ptr, data + rowbytes * static_cast<std::size_t>(y));
  }
  png_write_end(png_ptr, nullptr);
  png_destroy_write_struct(&png_ptr, &info_ptr);
  return true;
}

std::vector<std::uint8_t> encode_raw(int width, int height, int color_type, int bit_depth,
                                     const void* data, std::size_t bytes_per_pixel) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::kIo, "cannot encode an empty image as PNG");
  }
  std::vector<std::uint8_t> out;
  ErrorSink sink;
  const std::size_t rowbytes = bytes_per_pixel * static_cast<std::size_t>(width);
  if (!encode_impl(width, height, color_type, bit_depth, static_cast<const std::uint8_t*>(data),
                   rowbytes, &out, &sink)) {
    throw Error(ErrorKind::kIo, std::string("PNG encode failed: ") + sink.message);
  }
  return out;
}

}  // namespace

Decoded decode(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorKind::kIo, "not a PNG stream");
  }
  Decoded out;
  ReadCursor cursor{&bytes, 0};
  ErrorSink sink;
  if (!decode_impl(&cursor, &out, &sink)) {
    throw Error(ErrorKind::kIo, std::string("PNG decode failed: ") + sink.message);
  }
  return out;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

Decoded read_file(const std::filesystem::path& path) {
  try {
    return decode(read_bytes(path));
  } catch (const Error& e) {
    throw Error(ErrorKind::kIo, path.string() + ": " + e.what());
  }
}

RgbImage to_rgb(const Decoded& d) {
  if (d.bit_depth != 8) throw Error(ErrorKind::kIo, "expected an 8-bit PNG");
  RgbImage image(d.width, d.height);
  const auto& s = d.samples8;
  for (std::size_t i = 0; i < image.size(); ++i) {
    const std::size_t o = i * static_cast<std::size_t>(d.channels);
    if (d.channels >= 3) {
      image.data()[i] = {s[o], s[o + 1], s[o + 2]};
    } else {
      image.data()[i] = {s[o], s[o], s[o]};
    }
  }
  return image;
}

RgbaImage to_rgba(const Decoded& d) {
  if (d.bit_depth != 8) throw Error(ErrorKind::kIo, "expected an 8-bit PNG");
  RgbaImage image(d.width, d.height);
  const auto& s = d.samples8;
  for (std::size_t i = 0; i < image.size(); ++i) {
    const std::size_t o = i * static_cast<std::size_t>(d.channels);
    switch (d.channels) {
      case 4: image.data()[i] = {s[o], s[o + 1], s[o + 2], s[o + 3]}; break;
      case 3: image.data()[i] = {s[o], s[o + 1], s[o + 2], 255}; break;
      case 2: image.data()[i] = {s[o], s[o], s[o], s[o + 1]}; break;
      default: image.data()[i] = {s[o], s[o], s[o], 255}; break;
    }
  }
  return image;
}

std::vector<std::uint8_t> encode_rgb(const RgbImage& image) {
  static_assert(sizeof(Rgb8) == 3);
  return encode_raw(image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8, image.data().data(), 3);
}

std::vector<std::uint8_t> encode_rgba(const RgbaImage& image) {
  static_assert(sizeof(Rgba8) == 4);
  return encode_raw(image.width(), image.height(), PNG_COLOR_TYPE_RGBA, 8, image.data().data(), 4);
}

std::vector<std::uint8_t> encode_gray8(const Image<std::uint8_t>& image) {
  return encode_raw(image.width(), image.height(), PNG_COLOR_TYPE_GRAY, 8, image.data().data(), 1);
}

std::vector<std::uint8_t> encode_gray16(const Image<std::uint16_t>& image) {
  return encode_raw(image.width(), image.height(), PNG_COLOR_TYPE_GRAY, 16, image.data().data(), 2);
}

RgbImage load_rgb(const std::filesystem::path& path) { return to_rgb(read_file(path)); }
RgbaImage load_rgba(const std::filesystem::path& path) { return to_rgba(read_file(path)); }

void save_rgb(const std::filesystem::path& path, const RgbImage& image) {
  write_bytes(path, encode_rgb(image));
}

void save_rgba(const std::filesystem::path& path, const RgbaImage& image) {
  write_bytes(path, encode_rgba(image));
}

}  // namespace faceseg::png
