#include "simpf/render.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <string>

#include "simpf/container.hpp"
#include "simpf/error.hpp"

namespace simpf {

GrayImage render_spectrogram(const Matrix<double>& data) {
  if (data.size() == 0) throw Error(ErrorKind::kPrecondition, "render: empty spectrogram");
  const auto values = data.values();
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;

  GrayImage img{data.cols(), data.rows(), std::vector<std::uint8_t>(data.size())};
  for (std::size_t f = 0; f < data.rows(); ++f) {
    const std::size_t y = data.rows() - 1 - f;
    for (std::size_t t = 0; t < data.cols(); ++t) {
      const double u = range > 0.0 ? (data(f, t) - lo) / range : 0.5;
      img.pixels[y * img.width + t] = static_cast<std::uint8_t>(std::lround(255.0 * u));
    }
  }
  return img;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  const std::string header =
      "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  // Header is three whitespace-separated tokens after the magic, then exactly
  // one whitespace byte before the raster.
  std::size_t pos = 0;
  const auto token = [&]() {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    }
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) tok.push_back(static_cast<char>(bytes[pos++]));
    return tok;
  };
  if (token() != "P5") throw Error(ErrorKind::kFormat, "pgm: missing P5 magic");
  GrayImage img;
  try {
    img.width = std::stoul(token());
    img.height = std::stoul(token());
    if (std::stoul(token()) != 255) throw Error(ErrorKind::kFormat, "pgm: maxval must be 255");
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::kFormat, "pgm: malformed header");
  }
  ++pos;
  if (bytes.size() < pos || bytes.size() - pos != img.width * img.height) {
    throw Error(ErrorKind::kFormat, "pgm: raster size does not match header");
  }
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  write_file_bytes(path, encode_pgm(image));
}

}  // namespace simpf
