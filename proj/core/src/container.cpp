#include "simpf/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <ostream>
#include <string>

#include "simpf/error.hpp"

namespace simpf {
namespace {

constexpr char kMelMagic[8] = {'S', 'I', 'M', 'P', 'F', 'M', 'E', 'L'};
constexpr char kCompressedMagic[8] = {'S', 'I', 'M', 'P', 'F', 'C', 'M', 'P'};

class Writer {
 public:
  void magic(const char (&m)[8]) { bytes.insert(bytes.end(), m, m + 8); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void matrix(const Matrix<double>& m) {
    for (double v : m.values()) f64(v);
  }

  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorKind::kFormat, "container: truncated at offset " + std::to_string(pos_));
    }
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint64_t uint(std::size_t width) {
    auto b = take(width);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::uint64_t u64() { return uint(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

constexpr PoolMethod kMethodCodes[] = {PoolMethod::kMax, PoolMethod::kAvg, PoolMethod::kAvgMax,
                                       PoolMethod::kSpectral, PoolMethod::kUniform};

std::uint32_t method_code(PoolMethod m) {
  for (std::uint32_t i = 0; i < std::size(kMethodCodes); ++i) {
    if (kMethodCodes[i] == m) return i;
  }
  throw Error(ErrorKind::kConfig, "unknown pooling method");
}

Matrix<double> read_matrix(Reader& r, std::uint64_t rows, std::uint64_t cols) {
  if (rows == 0 || cols == 0) throw Error(ErrorKind::kFormat, "container: empty matrix");
  if (rows > std::numeric_limits<std::uint32_t>::max() || cols > std::numeric_limits<std::uint32_t>::max() ||
      rows * cols != r.remaining() / 8 || r.remaining() % 8 != 0) {
    throw Error(ErrorKind::kFormat, "container: payload size does not match " +
                                        std::to_string(rows) + " x " + std::to_string(cols));
  }
  Matrix<double> m(rows, cols);
  for (double& v : m.values()) v = r.f64();
  return m;
}

}  // namespace

std::vector<std::uint8_t> serialize(const Matrix<double>& mel) {
  Writer w;
  w.magic(kMelMagic);
  w.u64(mel.rows());
  w.u64(mel.cols());
  w.matrix(mel);
  return std::move(w.bytes);
}

std::vector<std::uint8_t> serialize(const CompressedSpectrogram& c) {
  Writer w;
  w.magic(kCompressedMagic);
  w.u64(c.data.rows());
  w.u64(c.data.cols());
  w.u32(method_code(c.spec.method));
  w.u32(static_cast<std::uint32_t>(c.spec.factor.denominator()));
  w.u64(c.original_frames);
  w.matrix(c.data);
  return std::move(w.bytes);
}

SpectrogramFile deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(8);
  SpectrogramFile out;
  if (std::memcmp(magic.data(), kMelMagic, 8) == 0) {
    const auto rows = r.u64();
    const auto cols = r.u64();
    out.data = read_matrix(r, rows, cols);
    out.original_frames = cols;
    return out;
  }
  if (std::memcmp(magic.data(), kCompressedMagic, 8) == 0) {
    const auto rows = r.u64();
    const auto cols = r.u64();
    const auto code = r.u32();
    const auto denominator = r.u32();
    out.original_frames = r.u64();
    if (code >= std::size(kMethodCodes)) {
      throw Error(ErrorKind::kFormat, "container: unknown method code " + std::to_string(code));
    }
    if (denominator < 2 || denominator > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
      throw Error(ErrorKind::kFormat, "container: invalid denominator " + std::to_string(denominator));
    }
    out.spec = CompressionSpec{kMethodCodes[code], CompressionFactor(static_cast<int>(denominator))};
    out.data = read_matrix(r, rows, cols);
    return out;
  }
  throw Error(ErrorKind::kFormat, "container: bad magic");
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

void write_container(const std::filesystem::path& path, const MelSpectrogram& mel) {
  write_file_bytes(path, serialize(mel.data));
}

void write_container(const std::filesystem::path& path, const CompressedSpectrogram& compressed) {
  write_file_bytes(path, serialize(compressed));
}

SpectrogramFile read_container(const std::filesystem::path& path) {
  return deserialize(read_file_bytes(path));
}

void write_csv(std::ostream& out, const Matrix<double>& data) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto row = data.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << row[c];
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace simpf
