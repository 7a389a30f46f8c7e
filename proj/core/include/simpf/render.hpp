#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "simpf/matrix.hpp"

namespace simpf {

// 8-bit grayscale raster, row-major, `width` pixels per row.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
};

// Time on x, mel band on y with the lowest band on the bottom row. Values are
// min-max normalized per image, round(255 * (v - min) / (max - min)); a
// constant image maps to mid-gray (128).
GrayImage render_spectrogram(const Matrix<double>& data);

// Binary PGM (P5, maxval 255).
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

}  // namespace simpf
