#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "simpf/features.hpp"
#include "simpf/fft.hpp"
#include "simpf/matrix.hpp"

namespace simpf {

enum class PoolMethod { kMax, kAvg, kAvgMax, kSpectral, kUniform };

std::string_view to_string(PoolMethod method);
// Accepts max, avg, avgmax (also avg-max, avg_max), spectral, uniform.
PoolMethod parse_pool_method(std::string_view name);

// Time-axis compression factor k = 1 / denominator, denominator >= 2.
class CompressionFactor {
 public:
  explicit CompressionFactor(int denominator);

  int denominator() const noexcept { return denominator_; }
  double k() const noexcept { return 1.0 / denominator_; }
  // floor(k * frames)
  std::size_t output_frames(std::size_t frames) const noexcept {
    return frames / static_cast<std::size_t>(denominator_);
  }

  friend bool operator==(const CompressionFactor&, const CompressionFactor&) = default;

 private:
  int denominator_;
};

struct CompressionSpec {
  PoolMethod method = PoolMethod::kAvg;
  CompressionFactor factor{2};

  // Textual form "method:denominator", e.g. "spectral:2".
  static CompressionSpec parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const CompressionSpec&, const CompressionSpec&) = default;
};

struct CompressedSpectrogram {
  Matrix<double> data;  // F x floor(kT)
  CompressionSpec spec;
  std::size_t original_frames = 0;

  std::size_t n_mels() const { return data.rows(); }
  std::size_t n_frames() const { return data.cols(); }
};

// Per-row DFT along time.
struct TimeAxisSpectrum {
  Matrix<dsp::Complex> coeffs;
  bool shifted = false;  // zero frequency moved to index floor(T/2)
};

TimeAxisSpectrum time_axis_dft(const Matrix<double>& x);
TimeAxisSpectrum fftshift(TimeAxisSpectrum spectrum);
TimeAxisSpectrum ifftshift(TimeAxisSpectrum spectrum);
// Real part of the per-row inverse DFT; accepts shifted or unshifted input.
Matrix<double> time_axis_idft(const TimeAxisSpectrum& spectrum);

// Core operators on a raw F x T matrix. All throw Error{kInputTooShort}
// when floor(kT) == 0. Trailing T mod (1/k) frames are dropped.
Matrix<double> pool_max(const Matrix<double>& x, CompressionFactor factor);
Matrix<double> pool_avg(const Matrix<double>& x, CompressionFactor factor);
Matrix<double> pool_avg_max(const Matrix<double>& x, CompressionFactor factor);
Matrix<double> pool_uniform(const Matrix<double>& x, CompressionFactor factor);
Matrix<double> pool_spectral(const Matrix<double>& x, CompressionFactor factor);

Matrix<double> compress(const Matrix<double>& x, const CompressionSpec& spec);

CompressedSpectrogram pool_max(const MelSpectrogram& x, CompressionFactor factor);
CompressedSpectrogram pool_avg(const MelSpectrogram& x, CompressionFactor factor);
CompressedSpectrogram pool_avg_max(const MelSpectrogram& x, CompressionFactor factor);
CompressedSpectrogram pool_uniform(const MelSpectrogram& x, CompressionFactor factor);
CompressedSpectrogram pool_spectral(const MelSpectrogram& x, CompressionFactor factor);

CompressedSpectrogram compress(const MelSpectrogram& x, const CompressionSpec& spec);

}  // namespace simpf
