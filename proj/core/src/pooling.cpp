#include "simpf/pooling.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>

#include "simpf/error.hpp"

namespace simpf {
namespace {

std::size_t checked_output_frames(const Matrix<double>& x, CompressionFactor factor) {
  const std::size_t out = factor.output_frames(x.cols());
  if (out == 0) {
    throw Error(ErrorKind::kInputTooShort,
                "compression 1/" + std::to_string(factor.denominator()) + " of " +
                    std::to_string(x.cols()) + " frames gives floor(kT) = 0 frames");
  }
  return out;
}

// Applies `reduce(window)` to each non-overlapping window of `m` frames.
template <typename Reduce>
Matrix<double> window_pool(const Matrix<double>& x, CompressionFactor factor, Reduce reduce) {
  const std::size_t out_frames = checked_output_frames(x, factor);
  const auto m = static_cast<std::size_t>(factor.denominator());
  Matrix<double> out(x.rows(), out_frames);
  for (std::size_t f = 0; f < x.rows(); ++f) {
    const auto src = x.row(f);
    auto dst = out.row(f);
    for (std::size_t t = 0; t < out_frames; ++t) dst[t] = reduce(src.subspan(t * m, m));
  }
  return out;
}

double window_max(std::span<const double> w) { return *std::max_element(w.begin(), w.end()); }

double window_mean(std::span<const double> w) {
  double sum = 0.0;
  for (double v : w) sum += v;
  return sum / static_cast<double>(w.size());
}

CompressedSpectrogram wrap(Matrix<double> data, const MelSpectrogram& x, PoolMethod method,
                           CompressionFactor factor) {
  return {std::move(data), CompressionSpec{method, factor}, x.n_frames()};
}

TimeAxisSpectrum rotate_rows(TimeAxisSpectrum s, bool forward) {
  const std::size_t n = s.coeffs.cols();
  s.shifted = forward;
  if (n == 0) return s;
  const std::size_t shift = forward ? n / 2 : n - n / 2;
  for (std::size_t f = 0; f < s.coeffs.rows(); ++f) {
    auto row = s.coeffs.row(f);
    // fftshift: out[(i + n/2) mod n] = in[i], i.e. rotate right by n/2.
    std::rotate(row.begin(), row.begin() + static_cast<std::ptrdiff_t>((n - shift) % n), row.end());
  }
  return s;
}

}  // namespace

std::string_view to_string(PoolMethod method) {
  switch (method) {
    case PoolMethod::kMax: return "max";
    case PoolMethod::kAvg: return "avg";
    case PoolMethod::kAvgMax: return "avgmax";
    case PoolMethod::kSpectral: return "spectral";
    case PoolMethod::kUniform: return "uniform";
  }
  return "unknown";
}

PoolMethod parse_pool_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "max") return PoolMethod::kMax;
  if (lower == "avg") return PoolMethod::kAvg;
  if (lower == "avgmax" || lower == "avg-max" || lower == "avg_max") return PoolMethod::kAvgMax;
  if (lower == "spectral") return PoolMethod::kSpectral;
  if (lower == "uniform") return PoolMethod::kUniform;
  throw Error(ErrorKind::kConfig, "unknown pooling method '" + std::string(name) +
                                      "' (expected max, avg, avgmax, spectral or uniform)");
}

CompressionFactor::CompressionFactor(int denominator) : denominator_(denominator) {
  if (denominator < 2) {
    throw Error(ErrorKind::kConfig,
                "compression denominator must be an integer >= 2, got " + std::to_string(denominator));
  }
}

CompressionSpec CompressionSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorKind::kConfig, "compression spec '" + std::string(text) +
                                        "' must have the form method:denominator");
  }
  const PoolMethod method = parse_pool_method(text.substr(0, colon));
  const auto digits = text.substr(colon + 1);
  int denominator = 0;
  const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), denominator);
  if (ec != std::errc{} || end != digits.data() + digits.size() || digits.empty()) {
    throw Error(ErrorKind::kConfig, "compression denominator '" + std::string(digits) +
                                        "' is not an integer");
  }
  return {method, CompressionFactor(denominator)};
}

std::string CompressionSpec::to_string() const {
  return std::string(simpf::to_string(method)) + ":" + std::to_string(factor.denominator());
}

TimeAxisSpectrum time_axis_dft(const Matrix<double>& x) {
  TimeAxisSpectrum s{Matrix<dsp::Complex>(x.rows(), x.cols()), false};
  for (std::size_t f = 0; f < x.rows(); ++f) {
    const auto coeffs = dsp::fft(x.row(f));
    std::copy(coeffs.begin(), coeffs.end(), s.coeffs.row(f).begin());
  }
  return s;
}

TimeAxisSpectrum fftshift(TimeAxisSpectrum spectrum) {
  if (spectrum.shifted) return spectrum;
  return rotate_rows(std::move(spectrum), true);
}

TimeAxisSpectrum ifftshift(TimeAxisSpectrum spectrum) {
  if (!spectrum.shifted) return spectrum;
  return rotate_rows(std::move(spectrum), false);
}

Matrix<double> time_axis_idft(const TimeAxisSpectrum& spectrum) {
  const TimeAxisSpectrum plain = ifftshift(spectrum);
  Matrix<double> out(plain.coeffs.rows(), plain.coeffs.cols());
  for (std::size_t f = 0; f < out.rows(); ++f) {
    const auto values = dsp::ifft(plain.coeffs.row(f));
    auto dst = out.row(f);
    for (std::size_t t = 0; t < values.size(); ++t) dst[t] = values[t].real();
  }
  return out;
}

Matrix<double> pool_max(const Matrix<double>& x, CompressionFactor factor) {
  return window_pool(x, factor, window_max);
}

Matrix<double> pool_avg(const Matrix<double>& x, CompressionFactor factor) {
  return window_pool(x, factor, window_mean);
}

Matrix<double> pool_avg_max(const Matrix<double>& x, CompressionFactor factor) {
  return window_pool(x, factor,
                     [](std::span<const double> w) { return window_max(w) + window_mean(w); });
}

Matrix<double> pool_uniform(const Matrix<double>& x, CompressionFactor factor) {
  return window_pool(x, factor, [](std::span<const double> w) { return w.front(); });
}

Matrix<double> pool_spectral(const Matrix<double>& x, CompressionFactor factor) {
  const std::size_t out_frames = checked_output_frames(x, factor);
  const std::size_t in_frames = x.cols();
  const TimeAxisSpectrum centered = fftshift(time_axis_dft(x));

  // Half-open crop around the zero-frequency index; for even out_frames the
  // highest positive-frequency coefficient is the one left out.
  const std::size_t center = in_frames / 2;
  const std::size_t first = center - out_frames / 2;
  TimeAxisSpectrum cropped{Matrix<dsp::Complex>(x.rows(), out_frames), true};
  for (std::size_t f = 0; f < x.rows(); ++f) {
    const auto src = centered.coeffs.row(f).subspan(first, out_frames);
    std::copy(src.begin(), src.end(), cropped.coeffs.row(f).begin());
  }

  Matrix<double> out = time_axis_idft(cropped);
  const double scale = static_cast<double>(out_frames) / static_cast<double>(in_frames);
  for (double& v : out.values()) v *= scale;
  return out;
}

Matrix<double> compress(const Matrix<double>& x, const CompressionSpec& spec) {
  switch (spec.method) {
    case PoolMethod::kMax: return pool_max(x, spec.factor);
    case PoolMethod::kAvg: return pool_avg(x, spec.factor);
    case PoolMethod::kAvgMax: return pool_avg_max(x, spec.factor);
    case PoolMethod::kSpectral: return pool_spectral(x, spec.factor);
    case PoolMethod::kUniform: return pool_uniform(x, spec.factor);
  }
  throw Error(ErrorKind::kConfig, "unknown pooling method");
}

CompressedSpectrogram pool_max(const MelSpectrogram& x, CompressionFactor factor) {
  return wrap(pool_max(x.data, factor), x, PoolMethod::kMax, factor);
}

CompressedSpectrogram pool_avg(const MelSpectrogram& x, CompressionFactor factor) {
  return wrap(pool_avg(x.data, factor), x, PoolMethod::kAvg, factor);
}

CompressedSpectrogram pool_avg_max(const MelSpectrogram& x, CompressionFactor factor) {
  return wrap(pool_avg_max(x.data, factor), x, PoolMethod::kAvgMax, factor);
}

CompressedSpectrogram pool_uniform(const MelSpectrogram& x, CompressionFactor factor) {
  return wrap(pool_uniform(x.data, factor), x, PoolMethod::kUniform, factor);
}

CompressedSpectrogram pool_spectral(const MelSpectrogram& x, CompressionFactor factor) {
  return wrap(pool_spectral(x.data, factor), x, PoolMethod::kSpectral, factor);
}

CompressedSpectrogram compress(const MelSpectrogram& x, const CompressionSpec& spec) {
  return wrap(compress(x.data, spec), x, spec.method, spec.factor);
}

}  // namespace simpf
