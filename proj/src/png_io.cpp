#include "gap/png_io.hpp"

#include "gap/errors.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>

namespace gap {

namespace {

struct MemWriter {
  std::vector<uint8_t>* out;
};

void png_write_to_vector(png_structp png, png_bytep data, png_size_t len) {
  auto* w = static_cast<MemWriter*>(png_get_io_ptr(png));
  w->out->insert(w->out->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

struct MemReader {
  const uint8_t* data;
  size_t size;
  size_t pos;
};

void png_read_from_vector(png_structp png, png_bytep out, png_size_t len) {
  auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
  if (r->pos + len > r->size) png_error(png, "read past end of PNG buffer");
  std::memcpy(out, r->data + r->pos, len);
  r->pos += len;
}

[[noreturn]] void png_throw(png_structp, png_const_charp msg) {
  throw IoError(std::string("PNG: ") + (msg ? msg : "unknown error"));
}

void png_warn_noop(png_structp, png_const_charp) {}

class PngWriteCtx {
 public:
  PngWriteCtx() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_warn_noop);
    if (!png) throw IoError("PNG: failed to allocate write struct");
    info = png_create_info_struct(png);
    if (!info) {
      png_destroy_write_struct(&png, nullptr);
      throw IoError("PNG: failed to allocate info struct");
    }
  }
  ~PngWriteCtx() { png_destroy_write_struct(&png, &info); }
  png_structp png = nullptr;
  png_infop info = nullptr;
};

class PngReadCtx {
 public:
  PngReadCtx() {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_warn_noop);
    if (!png) throw IoError("PNG: failed to allocate read struct");
    info = png_create_info_struct(png);
    if (!info) {
      png_destroy_read_struct(&png, nullptr, nullptr);
      throw IoError("PNG: failed to allocate info struct");
    }
  }
  ~PngReadCtx() { png_destroy_read_struct(&png, &info, nullptr); }
  png_structp png = nullptr;
  png_infop info = nullptr;
};

uint8_t to_u8(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<uint8_t>(std::lround(c * 255.0));
}

void check_dims(int width, int height, size_t samples, size_t expected_per_pixel) {
  if (width <= 0 || height <= 0 ||
      samples != static_cast<size_t>(width) * height * expected_per_pixel)
    throw IoError("PNG: sample buffer does not match dimensions");
}

}  // namespace

std::vector<uint8_t> encode_png_rgb8(const ImageRGB& image) {
  check_dims(image.width, image.height, image.data.size(), 3);
  std::vector<uint8_t> rows(static_cast<size_t>(image.width) * image.height * 3);
  for (size_t i = 0; i < image.data.size(); ++i) rows[i] = to_u8(image.data[i]);

  std::vector<uint8_t> out;
  MemWriter writer{&out};
  PngWriteCtx ctx;
  png_set_write_fn(ctx.png, &writer, png_write_to_vector, png_flush_noop);
  png_set_IHDR(ctx.png, ctx.info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);
  for (int y = 0; y < image.height; ++y)
    png_write_row(ctx.png, rows.data() + static_cast<size_t>(y) * image.width * 3);
  png_write_end(ctx.png, nullptr);
  return out;
}

ImageRGB decode_png_rgb8(const std::vector<uint8_t>& bytes) {
  MemReader reader{bytes.data(), bytes.size(), 0};
  PngReadCtx ctx;
  png_set_read_fn(ctx.png, &reader, png_read_from_vector);
  png_read_info(ctx.png, ctx.info);

  const png_uint_32 w = png_get_image_width(ctx.png, ctx.info);
  const png_uint_32 h = png_get_image_height(ctx.png, ctx.info);

  // normalize whatever arrives to 8-bit RGB
  png_set_expand(ctx.png);
  png_set_strip_16(ctx.png);
  png_set_strip_alpha(ctx.png);
  png_set_gray_to_rgb(ctx.png);
  png_read_update_info(ctx.png, ctx.info);

  if (png_get_rowbytes(ctx.png, ctx.info) != w * 3) throw IoError("PNG: unexpected row size");

  std::vector<uint8_t> rows(static_cast<size_t>(w) * h * 3);
  for (png_uint_32 y = 0; y < h; ++y)
    png_read_row(ctx.png, rows.data() + static_cast<size_t>(y) * w * 3, nullptr);

  ImageRGB img(static_cast<int>(w), static_cast<int>(h));
  for (size_t i = 0; i < rows.size(); ++i) img.data[i] = rows[i] / 255.0;
  return img;
}

std::vector<uint8_t> encode_png_gray16(const std::vector<uint16_t>& samples, int width,
                                       int height) {
  check_dims(width, height, samples.size(), 1);
  std::vector<uint8_t> out;
  MemWriter writer{&out};
  PngWriteCtx ctx;
  png_set_write_fn(ctx.png, &writer, png_write_to_vector, png_flush_noop);
  png_set_IHDR(ctx.png, ctx.info, width, height, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);
  png_set_swap(ctx.png);  // samples are host little-endian
  for (int y = 0; y < height; ++y) {
    png_write_row(ctx.png, reinterpret_cast<png_const_bytep>(samples.data() +
                                                             static_cast<size_t>(y) * width));
  }
  png_write_end(ctx.png, nullptr);
  return out;
}

std::vector<uint16_t> decode_png_gray16(const std::vector<uint8_t>& bytes, int* width,
                                        int* height) {
  MemReader reader{bytes.data(), bytes.size(), 0};
  PngReadCtx ctx;
  png_set_read_fn(ctx.png, &reader, png_read_from_vector);
  png_read_info(ctx.png, ctx.info);

  const png_uint_32 w = png_get_image_width(ctx.png, ctx.info);
  const png_uint_32 h = png_get_image_height(ctx.png, ctx.info);
  const int color = png_get_color_type(ctx.png, ctx.info);
  const int depth = png_get_bit_depth(ctx.png, ctx.info);
  if (color != PNG_COLOR_TYPE_GRAY) throw IoError("PNG: expected grayscale depth image");
  if (depth < 16) png_set_expand_16(ctx.png);
  png_set_swap(ctx.png);
  png_read_update_info(ctx.png, ctx.info);

  std::vector<uint16_t> samples(static_cast<size_t>(w) * h);
  for (png_uint_32 y = 0; y < h; ++y) {
    png_read_row(ctx.png,
                 reinterpret_cast<png_bytep>(samples.data() + static_cast<size_t>(y) * w),
                 nullptr);
  }
  if (width) *width = static_cast<int>(w);
  if (height) *height = static_cast<int>(h);
  return samples;
}

std::vector<uint8_t> encode_png_indexed8(const std::vector<uint8_t>& values, int width,
                                         int height) {
  check_dims(width, height, values.size(), 1);
  std::vector<uint8_t> out;
  MemWriter writer{&out};
  PngWriteCtx ctx;
  png_set_write_fn(ctx.png, &writer, png_write_to_vector, png_flush_noop);
  png_set_IHDR(ctx.png, ctx.info, width, height, 8, PNG_COLOR_TYPE_PALETTE, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_color palette[256];
  for (int i = 0; i < 256; ++i) {
    palette[i].red = palette[i].green = palette[i].blue = static_cast<png_byte>(i);
  }
  png_set_PLTE(ctx.png, ctx.info, palette, 256);
  png_write_info(ctx.png, ctx.info);
  for (int y = 0; y < height; ++y)
    png_write_row(ctx.png, const_cast<png_bytep>(values.data() + static_cast<size_t>(y) * width));
  png_write_end(ctx.png, nullptr);
  return out;
}

std::vector<uint8_t> decode_png_indexed8(const std::vector<uint8_t>& bytes, int* width,
                                         int* height) {
  MemReader reader{bytes.data(), bytes.size(), 0};
  PngReadCtx ctx;
  png_set_read_fn(ctx.png, &reader, png_read_from_vector);
  png_read_info(ctx.png, ctx.info);

  const png_uint_32 w = png_get_image_width(ctx.png, ctx.info);
  const png_uint_32 h = png_get_image_height(ctx.png, ctx.info);
  const int color = png_get_color_type(ctx.png, ctx.info);
  const int depth = png_get_bit_depth(ctx.png, ctx.info);
  if ((color != PNG_COLOR_TYPE_PALETTE && color != PNG_COLOR_TYPE_GRAY) || depth != 8)
    throw IoError("PNG: expected an 8-bit palette/gray mask");
  if (depth < 8) png_set_packing(ctx.png);
  png_read_update_info(ctx.png, ctx.info);
  if (png_get_rowbytes(ctx.png, ctx.info) != w) throw IoError("PNG: unexpected mask row size");

  std::vector<uint8_t> values(static_cast<size_t>(w) * h);
  for (png_uint_32 y = 0; y < h; ++y)
    png_read_row(ctx.png, values.data() + static_cast<size_t>(y) * w, nullptr);
  if (width) *width = static_cast<int>(w);
  if (height) *height = static_cast<int>(h);
  return values;
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<uint8_t> bytes(static_cast<size_t>(size));
  in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!in) throw IoError("failed reading '" + path + "'");
  return bytes;
}

}  // namespace gap
