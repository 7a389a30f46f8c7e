#include "simpf/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "simpf/error.hpp"
#include "simpf/fft.hpp"

namespace simpf {
namespace {

// Mirror index into [0, len) without repeating the edge sample.
std::size_t reflect_index(std::ptrdiff_t i, std::size_t len) {
  if (len == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (len - 1));
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<std::ptrdiff_t>(len)) i = period - i;
  return static_cast<std::size_t>(i);
}

Matrix<double> stft_with_window(const AudioClip& clip, const SpectrogramConfig& cfg,
                                std::span<const double> window) {
  if (clip.samples.empty()) {
    throw Error(ErrorKind::kPrecondition, "stft: clip must hold at least one sample");
  }
  const std::size_t len = clip.samples.size();
  const std::size_t n_frames = cfg.frames_for(len);
  const std::size_t n_bins = cfg.n_bins();
  const auto half = static_cast<std::ptrdiff_t>(cfg.n_fft / 2);

  Matrix<double> power(n_bins, n_frames);
  std::vector<dsp::Complex> buf(cfg.n_fft);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const auto start = static_cast<std::ptrdiff_t>(t * cfg.hop) - half;
    for (std::size_t i = 0; i < cfg.n_fft; ++i) {
      const std::size_t src = reflect_index(start + static_cast<std::ptrdiff_t>(i), len);
      buf[i] = clip.samples[src] * window[i];
    }
    dsp::fft_radix2(buf, false);
    for (std::size_t k = 0; k < n_bins; ++k) power(k, t) = std::norm(buf[k]);
  }
  return power;
}

}  // namespace

void SpectrogramConfig::validate(std::uint32_t sample_rate) const {
  if (sample_rate == 0) throw Error(ErrorKind::kConfig, "sample rate must be positive");
  if (!dsp::is_power_of_two(n_fft) || n_fft < 2) {
    throw Error(ErrorKind::kConfig, "n_fft must be a power of two >= 2, got " + std::to_string(n_fft));
  }
  if (hop == 0 || hop > n_fft) {
    throw Error(ErrorKind::kConfig, "hop must satisfy 0 < hop <= n_fft");
  }
  if (n_mels == 0) throw Error(ErrorKind::kConfig, "n_mels must be positive");
  const double hi = resolved_f_max(sample_rate);
  if (!(f_min >= 0.0) || !(f_min < hi) || hi > sample_rate / 2.0) {
    throw Error(ErrorKind::kConfig, "frequency range must satisfy 0 <= f_min < f_max <= sample_rate/2");
  }
  if (!(log_floor > 0.0)) throw Error(ErrorKind::kConfig, "log_floor must be positive");
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> hann_window(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::kPrecondition, "hann_window: n must be >= 1");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

std::vector<double> windowed_power_spectrum(std::span<const double> frame,
                                            std::span<const double> window, bool full) {
  if (frame.size() != window.size()) {
    throw Error(ErrorKind::kShape, "frame and window lengths differ");
  }
  std::vector<dsp::Complex> buf(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = frame[i] * window[i];
  const auto spectrum = dsp::fft(buf);
  const std::size_t n_out = full ? spectrum.size() : spectrum.size() / 2 + 1;
  std::vector<double> power(n_out);
  for (std::size_t k = 0; k < n_out; ++k) power[k] = std::norm(spectrum[k]);
  return power;
}

Matrix<double> stft_power(const AudioClip& clip, const SpectrogramConfig& cfg) {
  cfg.validate(clip.sample_rate == 0 ? 1 : clip.sample_rate);
  const auto window = hann_window(cfg.n_fft);
  return stft_with_window(clip, cfg, window);
}

Matrix<double> mel_filterbank(const SpectrogramConfig& cfg, std::uint32_t sample_rate) {
  cfg.validate(sample_rate);
  const std::size_t n_bins = cfg.n_bins();
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(cfg.n_fft);
  const double mel_lo = hz_to_mel(cfg.f_min);
  const double mel_hi = hz_to_mel(cfg.resolved_f_max(sample_rate));

  // n_mels + 2 edges: filter m rises over [edge m, edge m+1] and falls over [edge m+1, edge m+2].
  std::vector<double> edges(cfg.n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                    static_cast<double>(cfg.n_mels + 1);
    edges[i] = mel_to_hz(mel);
  }

  Matrix<double> fb(cfg.n_mels, n_bins);
  for (std::size_t m = 0; m < cfg.n_mels; ++m) {
    const double lo = edges[m];
    const double center = edges[m + 1];
    const double hi = edges[m + 2];
    if (hi - lo < bin_hz) {
      throw Error(ErrorKind::kConfig,
                  "mel filter " + std::to_string(m) + " spans less than one FFT bin; reduce n_mels or raise n_fft");
    }
    const double scale = cfg.mel_norm == MelNorm::kArea ? 2.0 / (hi - lo) : 1.0;
    bool any = false;
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      const double rise = (f - lo) / (center - lo);
      const double fall = (hi - f) / (hi - center);
      const double weight = std::max(0.0, std::min(rise, fall));
      fb(m, k) = weight * scale;
      any = any || weight > 0.0;
    }
    if (!any) {
      throw Error(ErrorKind::kConfig,
                  "mel filter " + std::to_string(m) + " covers no FFT bin centre; reduce n_mels or raise n_fft");
    }
  }
  return fb;
}

MelExtractor::MelExtractor(SpectrogramConfig cfg, std::uint32_t sample_rate)
    : cfg_(cfg), sample_rate_(sample_rate), filterbank_(mel_filterbank(cfg, sample_rate)) {
  bands_.resize(cfg_.n_mels);
  for (std::size_t m = 0; m < cfg_.n_mels; ++m) {
    const auto row = filterbank_.row(m);
    auto first = std::find_if(row.begin(), row.end(), [](double v) { return v != 0.0; });
    auto last = std::find_if(row.rbegin(), row.rend(), [](double v) { return v != 0.0; });
    bands_[m] = {static_cast<std::size_t>(first - row.begin()),
                 static_cast<std::size_t>(row.rend() - last)};
  }
}

MelSpectrogram MelExtractor::operator()(const AudioClip& clip) const {
  if (clip.sample_rate != sample_rate_) {
    throw Error(ErrorKind::kConfig, "clip sample rate " + std::to_string(clip.sample_rate) +
                                        " does not match extractor rate " + std::to_string(sample_rate_));
  }
  const auto window = hann_window(cfg_.n_fft);
  const Matrix<double> power = stft_with_window(clip, cfg_, window);
  const std::size_t n_frames = power.cols();

  MelSpectrogram out;
  out.config = cfg_;
  out.sample_rate = sample_rate_;
  out.data = Matrix<double>(cfg_.n_mels, n_frames);
  const double log_floor = std::log(cfg_.log_floor);
  for (std::size_t m = 0; m < cfg_.n_mels; ++m) {
    auto dst = out.data.row(m);
    std::fill(dst.begin(), dst.end(), 0.0);
    for (std::size_t k = bands_[m].first; k < bands_[m].last; ++k) {
      const double w = filterbank_(m, k);
      const auto src = power.row(k);
      for (std::size_t t = 0; t < n_frames; ++t) dst[t] += w * src[t];
    }
    for (double& v : dst) v = v > cfg_.log_floor ? std::log(v) : log_floor;
  }
  return out;
}

MelSpectrogram log_mel(const AudioClip& clip, const SpectrogramConfig& cfg) {
  return MelExtractor(cfg, clip.sample_rate)(clip);
}

}  // namespace simpf
