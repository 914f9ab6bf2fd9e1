#pragma once

#include "gap/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gap {

// 8-bit RGB PNG; values are clamped to [0,1] and rounded.
std::vector<uint8_t> encode_png_rgb8(const ImageRGB& image);
ImageRGB decode_png_rgb8(const std::vector<uint8_t>& bytes);

// 16-bit grayscale PNG (used for linear-depth transport).
std::vector<uint8_t> encode_png_gray16(const std::vector<uint16_t>& samples, int width, int height);
std::vector<uint16_t> decode_png_gray16(const std::vector<uint8_t>& bytes, int* width, int* height);

// 8-bit palette PNG with a grayscale palette; `values` are palette indices.
std::vector<uint8_t> encode_png_indexed8(const std::vector<uint8_t>& values, int width, int height);
std::vector<uint8_t> decode_png_indexed8(const std::vector<uint8_t>& bytes, int* width, int* height);

void write_file(const std::string& path, const std::vector<uint8_t>& bytes);
std::vector<uint8_t> read_file(const std::string& path);

}  // namespace gap
