#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace simpf {

// Mono signal with amplitudes in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  std::uint32_t sample_rate = 0;

  double duration_seconds() const {
    return sample_rate == 0 ? 0.0
                            : static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class WavEncoding { kPcm16, kFloat32 };

// Decodes a RIFF/WAVE byte stream (PCM16 or IEEE float32, 1 or 2 channels)
// into a mono clip. Stereo frames are averaged; PCM16 is scaled by 1/32768.
// Throws Error{kFormat} on malformed data and Error{kUnsupportedCodec} for
// any other encoding.
AudioClip decode_wav(std::span<const std::uint8_t> bytes);

// Interleaved multi-channel encoder. `frames` holds channels * n samples.
std::vector<std::uint8_t> encode_wav(std::span<const double> interleaved,
                                     std::uint16_t channels,
                                     std::uint32_t sample_rate,
                                     WavEncoding encoding);

std::vector<std::uint8_t> encode_wav(const AudioClip& clip,
                                     WavEncoding encoding = WavEncoding::kPcm16);

AudioClip read_wav_file(const std::filesystem::path& path);
void write_wav_file(const std::filesystem::path& path, const AudioClip& clip,
                    WavEncoding encoding = WavEncoding::kPcm16);

// Right-pads with zeros or truncates from the end so that the result holds
// round(target_seconds * sample_rate) samples.
AudioClip pad_or_trim(const AudioClip& clip, double target_seconds);

}  // namespace simpf
