#include "simpf/fft.hpp"

#include <cassert>
#include <numbers>
#include <utility>

namespace simpf::dsp {
namespace {

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// e^{sign * i * pi * k^2 / n}; k^2 is reduced mod 2n to keep the angle small.
Complex chirp(std::size_t k, std::size_t n, double sign) {
  const std::size_t k2 = (k * k) % (2 * n);
  const double angle = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

std::vector<Complex> bluestein(std::span<const Complex> x, bool inverse) {
  const std::size_t n = x.size();
  const std::size_t m = next_power_of_two(2 * n - 1);
  const double sign = inverse ? 1.0 : -1.0;

  std::vector<Complex> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp(k, n, sign);
  b[0] = chirp(0, n, -sign);
  for (std::size_t k = 1; k < n; ++k) {
    b[k] = b[m - k] = chirp(k, n, -sign);
  }
  fft_radix2(a, false);
  fft_radix2(b, false);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  fft_radix2(a, true);

  std::vector<Complex> out(n);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * scale * chirp(k, n, sign);
  return out;
}

std::vector<Complex> transform(std::span<const Complex> x, bool inverse) {
  if (x.empty()) return {};
  if (is_power_of_two(x.size())) {
    std::vector<Complex> out(x.begin(), x.end());
    fft_radix2(out, inverse);
    return out;
  }
  return bluestein(x, inverse);
}

}  // namespace

void fft_radix2(std::span<Complex> x, bool inverse) {
  const std::size_t n = x.size();
  assert(is_power_of_two(n));
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      // Twiddles computed directly rather than by recurrence to keep error flat in n.
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(len);
      const Complex w{std::cos(angle), std::sin(angle)};
      for (std::size_t start = 0; start < n; start += len) {
        const Complex u = x[start + k];
        const Complex v = x[start + k + half] * w;
        x[start + k] = u + v;
        x[start + k + half] = u - v;
      }
    }
  }
}

std::vector<Complex> fft(std::span<const Complex> x) { return transform(x, false); }

std::vector<Complex> fft(std::span<const double> x) {
  std::vector<Complex> c(x.begin(), x.end());
  return transform(c, false);
}

std::vector<Complex> ifft(std::span<const Complex> x) {
  auto out = transform(x, true);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace simpf::dsp
