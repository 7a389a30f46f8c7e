#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "simpf/features.hpp"
#include "simpf/pooling.hpp"

namespace simpf {

// Binary spectrogram containers, little-endian:
//
//   mel:        "SIMPFMEL" | u64 F | u64 T | F*T float64 row-major
//   compressed: "SIMPFCMP" | u64 F | u64 T | u32 method | u32 denominator
//               | u64 original_frames | F*T float64 row-major
//
// method codes: 0 max, 1 avg, 2 avgmax, 3 spectral, 4 uniform.
struct SpectrogramFile {
  Matrix<double> data;
  std::optional<CompressionSpec> spec;  // set for compressed containers
  std::uint64_t original_frames = 0;
};

std::vector<std::uint8_t> serialize(const Matrix<double>& mel);
std::vector<std::uint8_t> serialize(const CompressedSpectrogram& compressed);
SpectrogramFile deserialize(std::span<const std::uint8_t> bytes);

void write_container(const std::filesystem::path& path, const MelSpectrogram& mel);
void write_container(const std::filesystem::path& path, const CompressedSpectrogram& compressed);
SpectrogramFile read_container(const std::filesystem::path& path);

// One line per row (mel band), comma separated, max_digits10 precision.
void write_csv(std::ostream& out, const Matrix<double>& data);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace simpf
