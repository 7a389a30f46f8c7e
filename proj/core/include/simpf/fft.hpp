#pragma once

#include <complex>
#include <span>
#include <vector>

namespace simpf::dsp {

using Complex = std::complex<double>;

// Forward DFT, X[k] = sum_n x[n] e^{-2 pi i k n / N}. Any length N >= 1:
// radix-2 for powers of two, Bluestein's chirp-z otherwise.
std::vector<Complex> fft(std::span<const Complex> x);
std::vector<Complex> fft(std::span<const double> x);

// Inverse DFT including the 1/N factor.
std::vector<Complex> ifft(std::span<const Complex> x);

// In-place power-of-two transform. `inverse` flips the twiddle sign and
// does not scale.
void fft_radix2(std::span<Complex> x, bool inverse);

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace simpf::dsp
