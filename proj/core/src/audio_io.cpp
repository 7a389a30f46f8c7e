#include "simpf/audio_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "simpf/error.hpp"

namespace simpf {
namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  std::span<const std::uint8_t> take(std::size_t n) {
    if (remaining() < n) {
      throw Error(ErrorKind::kFormat, "wav: truncated data at offset " +
                                          std::to_string(pos_));
    }
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint16_t u16() {
    auto b = take(2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32() {
    auto b = take(4);
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }
  std::string tag() {
    auto b = take(4);
    return std::string(b.begin(), b.end());
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

FormatChunk parse_fmt(std::span<const std::uint8_t> body) {
  if (body.size() < 16) {
    throw Error(ErrorKind::kFormat, "wav: fmt chunk shorter than 16 bytes");
  }
  ByteReader r(body);
  FormatChunk fmt;
  fmt.format = r.u16();
  fmt.channels = r.u16();
  fmt.sample_rate = r.u32();
  r.u32();  // byte rate
  fmt.block_align = r.u16();
  fmt.bits = r.u16();
  if (fmt.format == kFormatExtensible) {
    if (body.size() < 40) {
      throw Error(ErrorKind::kFormat, "wav: truncated WAVE_FORMAT_EXTENSIBLE");
    }
    r.take(2 + 2 + 4);  // cbSize, valid bits, channel mask
    fmt.format = r.u16();  // first two bytes of the subformat GUID
  }
  return fmt;
}

float load_f32(const std::uint8_t* p) {
  std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                       (static_cast<std::uint32_t>(p[1]) << 8) |
                       (static_cast<std::uint32_t>(p[2]) << 16) |
                       (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

AudioClip decode_wav(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.remaining() < 12 || r.tag() != "RIFF") {
    throw Error(ErrorKind::kFormat, "wav: missing RIFF header");
  }
  r.u32();  // RIFF size; often wrong in the wild, so chunk sizes are trusted instead
  if (r.tag() != "WAVE") {
    throw Error(ErrorKind::kFormat, "wav: RIFF form type is not WAVE");
  }

  FormatChunk fmt;
  bool have_fmt = false;
  std::span<const std::uint8_t> data;
  bool have_data = false;
  while (r.remaining() >= 8 && !have_data) {
    const std::string id = r.tag();
    const std::uint32_t size = r.u32();
    if (id == "data") {
      // Tolerate a data chunk whose declared size overruns the file.
      data = r.take(std::min<std::size_t>(size, r.remaining()));
      have_data = true;
      break;
    }
    auto body = r.take(size);
    if (size % 2 == 1 && r.remaining() > 0) r.take(1);
    if (id == "fmt ") {
      fmt = parse_fmt(body);
      have_fmt = true;
    }
  }
  if (!have_fmt) throw Error(ErrorKind::kFormat, "wav: no fmt chunk");
  if (!have_data) throw Error(ErrorKind::kFormat, "wav: no data chunk");

  const bool pcm16 = fmt.format == kFormatPcm && fmt.bits == 16;
  const bool float32 = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!pcm16 && !float32) {
    throw Error(ErrorKind::kUnsupportedCodec,
                "wav: unsupported encoding (format tag " +
                    std::to_string(fmt.format) + ", " +
                    std::to_string(fmt.bits) + " bits)");
  }
  if (fmt.channels != 1 && fmt.channels != 2) {
    throw Error(ErrorKind::kUnsupportedCodec,
                "wav: only mono or stereo is supported, got " +
                    std::to_string(fmt.channels) + " channels");
  }
  if (fmt.sample_rate == 0) {
    throw Error(ErrorKind::kFormat, "wav: sample rate is zero");
  }
  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  if (fmt.block_align != frame_bytes) {
    throw Error(ErrorKind::kFormat, "wav: block_align does not match channels x sample size");
  }
  const std::size_t frames = data.size() / frame_bytes;
  if (frames == 0) throw Error(ErrorKind::kFormat, "wav: data chunk holds no frames");

  AudioClip clip;
  clip.sample_rate = fmt.sample_rate;
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const std::uint8_t* frame = data.data() + i * frame_bytes;
    double acc = 0.0;
    for (std::size_t ch = 0; ch < fmt.channels; ++ch) {
      const std::uint8_t* p = frame + ch * bytes_per_sample;
      if (pcm16) {
        auto v = static_cast<std::int16_t>(static_cast<std::uint16_t>(p[0] | (p[1] << 8)));
        acc += static_cast<double>(v) / 32768.0;
      } else {
        const float v = load_f32(p);
        if (!std::isfinite(v)) {
          throw Error(ErrorKind::kFormat, "wav: non-finite float sample at frame " +
                                              std::to_string(i));
        }
        acc += std::clamp(static_cast<double>(v), -1.0, 1.0);
      }
    }
    clip.samples[i] = acc / fmt.channels;
  }
  return clip;
}

std::vector<std::uint8_t> encode_wav(std::span<const double> interleaved,
                                     std::uint16_t channels,
                                     std::uint32_t sample_rate,
                                     WavEncoding encoding) {
  if (channels == 0 || interleaved.size() % channels != 0) {
    throw Error(ErrorKind::kPrecondition, "encode_wav: sample count is not a multiple of channels");
  }
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const auto data_bytes = static_cast<std::uint32_t>(interleaved.size() * (bits / 8));

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat);
  put_u16(out, channels);
  put_u32(out, sample_rate);
  put_u32(out, sample_rate * block_align);
  put_u16(out, block_align);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double x : interleaved) {
    if (encoding == WavEncoding::kPcm16) {
      const double scaled = std::round(std::clamp(x, -1.0, 1.0) * 32768.0);
      const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
      put_u16(out, static_cast<std::uint16_t>(v));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_wav(const AudioClip& clip, WavEncoding encoding) {
  return encode_wav(clip.samples, 1, clip.sample_rate, encoding);
}

AudioClip read_wav_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

void write_wav_file(const std::filesystem::path& path, const AudioClip& clip,
                    WavEncoding encoding) {
  const auto bytes = encode_wav(clip, encoding);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

AudioClip pad_or_trim(const AudioClip& clip, double target_seconds) {
  if (!(target_seconds > 0.0) || !std::isfinite(target_seconds)) {
    throw Error(ErrorKind::kPrecondition, "pad_or_trim: target_seconds must be positive");
  }
  const auto target = static_cast<std::size_t>(
      std::llround(target_seconds * static_cast<double>(clip.sample_rate)));
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.assign(target, 0.0);
  const std::size_t keep = std::min(target, clip.samples.size());
  std::copy_n(clip.samples.begin(), keep, out.samples.begin());
  return out;
}

}  // namespace simpf
