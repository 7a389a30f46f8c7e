#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "simpf/audio_io.hpp"

namespace simpf {

struct Label {
  std::size_t index = 0;
  friend bool operator==(const Label&, const Label&) = default;
};

struct LabeledClip {
  AudioClip clip;
  Label label;
};

enum class SynthClass : std::size_t { kTone = 0, kUpChirp = 1, kNoiseBurst = 2, kAmTone = 3 };

std::string_view to_string(SynthClass c);

struct SynthDatasetSpec {
  std::size_t n_classes = 4;  // 1..4, taken in SynthClass order
  std::size_t clips_per_class = 25;
  double clip_seconds = 1.0;
  std::uint32_t sample_rate = 16000;
  std::uint64_t seed = 0;
  double base_frequency = 1000.0;  // Hz, shared by tone, chirp start and AM carrier
  double frequency_jitter = 0.2;   // relative, uniform in [-j, +j]
  double noise_floor = 1e-3;       // background white-noise amplitude before peak normalization
};

inline constexpr double kSynthPeak = 0.9;

// Class-balanced, interleaved by class (0,1,2,3,0,1,...). Each clip is
// normalized to peak kSynthPeak. Deterministic in `spec.seed`.
std::vector<LabeledClip> synth_dataset(const SynthDatasetSpec& spec);

}  // namespace simpf
