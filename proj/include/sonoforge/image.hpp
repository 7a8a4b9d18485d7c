#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sonoforge/tfr.hpp"

namespace sonoforge {

/// 8-bit grayscale image; same orientation as TimeFreqMatrix
/// (rows = frequency low to high, cols = time).
struct GrayImage {
  std::vector<std::uint8_t> pixels;  // row-major rows*cols
  int rows = 0;
  int cols = 0;

  std::uint8_t& at(int r, int c) { return pixels[std::size_t(r) * cols + c]; }
  std::uint8_t at(int r, int c) const { return pixels[std::size_t(r) * cols + c]; }

  bool operator==(const GrayImage&) const = default;
};

void validate(const GrayImage& img);

/// Linear quantization: pixel = floor(255*(v - min)/(max - min));
/// a constant matrix maps to all zeros.
GrayImage to_gray(const TimeFreqMatrix& m);

enum class ImageFormat { Png, Pgm };

/// Serialized 8-bit grayscale file bytes (binary PGM P5 or grayscale PNG).
std::vector<std::uint8_t> encode_image(const GrayImage& img, ImageFormat format);

void export_image(const GrayImage& img, const std::filesystem::path& path,
                  ImageFormat format);

/// Reads binary PGM (P5, maxval 255) or 8-bit grayscale non-interlaced PNG.
GrayImage import_image(const std::filesystem::path& path);

GrayImage resize_bilinear(const GrayImage& img, int rows, int cols);

ImageFormat image_format_from_name(const std::string& name);  // "png" | "pgm"
std::string image_format_extension(ImageFormat format);

}  // namespace sonoforge
