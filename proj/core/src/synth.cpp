#include "simpf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "simpf/error.hpp"

namespace simpf {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void normalize_peak(std::vector<double>& x) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return;
  const double scale = kSynthPeak / peak;
  for (double& v : x) v *= scale;
}

std::vector<double> render(SynthClass cls, const SynthDatasetSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(1.0 - spec.frequency_jitter, 1.0 + spec.frequency_jitter);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double sr = spec.sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(spec.clip_seconds * sr));
  std::vector<double> x(n, 0.0);

  const double f0 = spec.base_frequency * jitter(rng);
  const double phase = kTwoPi * unit(rng);
  switch (cls) {
    case SynthClass::kTone:
      for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(kTwoPi * f0 * i / sr + phase);
      break;
    case SynthClass::kUpChirp: {
      // Linear sweep from f0 to 3 f0 across the clip.
      const double duration = n / sr;
      const double rate = 2.0 * f0 / duration;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = i / sr;
        x[i] = std::sin(kTwoPi * (f0 * t + 0.5 * rate * t * t) + phase);
      }
      break;
    }
    case SynthClass::kNoiseBurst: {
      const auto len = static_cast<std::size_t>(n * (0.1 + 0.2 * unit(rng)));
      const auto onset = static_cast<std::size_t>((n - len) * unit(rng));
      for (std::size_t i = onset; i < onset + len; ++i) x[i] = gauss(rng);
      break;
    }
    case SynthClass::kAmTone: {
      const double mod_hz = 150.0 + 100.0 * unit(rng);
      const double mod_phase = kTwoPi * unit(rng);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = i / sr;
        const double envelope = 0.5 * (1.0 + std::sin(kTwoPi * mod_hz * t + mod_phase));
        x[i] = envelope * std::sin(kTwoPi * f0 * t + phase);
      }
      break;
    }
  }
  for (double& v : x) v += spec.noise_floor * gauss(rng);
  normalize_peak(x);
  return x;
}

}  // namespace

std::string_view to_string(SynthClass c) {
  switch (c) {
    case SynthClass::kTone: return "tone";
    case SynthClass::kUpChirp: return "up-chirp";
    case SynthClass::kNoiseBurst: return "noise-burst";
    case SynthClass::kAmTone: return "am-tone";
  }
  return "unknown";
}

std::vector<LabeledClip> synth_dataset(const SynthDatasetSpec& spec) {
  if (spec.n_classes == 0 || spec.n_classes > 4) {
    throw Error(ErrorKind::kConfig, "synth: n_classes must be in [1, 4], got " + std::to_string(spec.n_classes));
  }
  if (!(spec.clip_seconds > 0.0) || spec.sample_rate == 0 ||
      std::llround(spec.clip_seconds * spec.sample_rate) < 1) {
    throw Error(ErrorKind::kConfig, "synth: clip must hold at least one sample");
  }
  if (!(spec.frequency_jitter >= 0.0 && spec.frequency_jitter < 1.0) ||
      spec.base_frequency * 3.0 * (1.0 + spec.frequency_jitter) >= spec.sample_rate / 2.0) {
    throw Error(ErrorKind::kConfig, "synth: base frequency and jitter must keep every class below Nyquist");
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<LabeledClip> out;
  out.reserve(spec.n_classes * spec.clips_per_class);
  for (std::size_t i = 0; i < spec.clips_per_class; ++i) {
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
      LabeledClip item;
      item.clip.sample_rate = spec.sample_rate;
      item.clip.samples = render(static_cast<SynthClass>(c), spec, rng);
      item.label = Label{c};
      out.push_back(std::move(item));
    }
  }
  return out;
}

}  // namespace simpf
