#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "simpf/audio_io.hpp"
#include "simpf/matrix.hpp"

namespace simpf {

enum class MelNorm {
  kArea,  // each triangle scaled to unit area (2 / bandwidth in Hz)
  kNone,  // unit peak height
};

struct SpectrogramConfig {
  std::size_t n_fft = 1024;
  std::size_t hop = 320;
  std::size_t n_mels = 64;
  double f_min = 0.0;
  double f_max = 0.0;  // <= 0 means sample_rate / 2
  double log_floor = 1e-10;
  MelNorm mel_norm = MelNorm::kArea;

  double resolved_f_max(std::uint32_t sample_rate) const {
    return f_max > 0.0 ? f_max : sample_rate / 2.0;
  }
  std::size_t n_bins() const { return n_fft / 2 + 1; }
  std::size_t frames_for(std::size_t n_samples) const { return n_samples / hop + 1; }

  // Throws Error{kConfig} when the invariants do not hold for this rate.
  void validate(std::uint32_t sample_rate) const;
};

// F x T log-power mel spectrogram (natural log), rows are mel bands.
struct MelSpectrogram {
  Matrix<double> data;
  SpectrogramConfig config;
  std::uint32_t sample_rate = 0;

  std::size_t n_mels() const { return data.rows(); }
  std::size_t n_frames() const { return data.cols(); }
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Periodic Hann window, w[i] = 0.5 - 0.5 cos(2 pi i / n).
std::vector<double> hann_window(std::size_t n);

// |DFT(window * frame)|^2. With `full` all n bins are returned, otherwise
// bins 0..n/2.
std::vector<double> windowed_power_spectrum(std::span<const double> frame,
                                            std::span<const double> window,
                                            bool full = false);

// Center-framed power STFT, (n_fft/2 + 1) x (len/hop + 1). The signal is
// reflect-padded by n_fft/2 on both sides.
Matrix<double> stft_power(const AudioClip& clip, const SpectrogramConfig& cfg);

// Triangular filters with centers equally spaced on the HTK mel scale.
Matrix<double> mel_filterbank(const SpectrogramConfig& cfg, std::uint32_t sample_rate);

// Reuses the window and filterbank across clips with the same rate.
class MelExtractor {
 public:
  MelExtractor(SpectrogramConfig cfg, std::uint32_t sample_rate);

  MelSpectrogram operator()(const AudioClip& clip) const;

  const SpectrogramConfig& config() const { return cfg_; }
  std::uint32_t sample_rate() const { return sample_rate_; }
  const Matrix<double>& filterbank() const { return filterbank_; }

 private:
  struct Band {
    std::size_t first = 0;
    std::size_t last = 0;  // exclusive
  };

  SpectrogramConfig cfg_;
  std::uint32_t sample_rate_;
  Matrix<double> filterbank_;
  std::vector<Band> bands_;
};

MelSpectrogram log_mel(const AudioClip& clip, const SpectrogramConfig& cfg = {});

}  // namespace simpf
