#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "simpf/pooling.hpp"
#include "test_util.hpp"

using namespace simpf;
using M = Matrix<double>;

namespace {

M row(std::vector<double> v) {
  const std::size_t n = v.size();
  return M(1, n, std::move(v));
}

CompressionFactor k(int den) { return CompressionFactor(den); }

constexpr PoolMethod kAllMethods[] = {PoolMethod::kMax, PoolMethod::kAvg, PoolMethod::kAvgMax,
                                      PoolMethod::kSpectral, PoolMethod::kUniform};

void expect_near(const M& a, const M& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  EXPECT_LE(oracle::max_abs_diff(a, b), tol);
}

}  // namespace

// ------------------------------------------------------------ parsing

TEST(CompressionSpec, ParseAndFormat) {
  const auto s = CompressionSpec::parse("spectral:2");
  EXPECT_EQ(s.method, PoolMethod::kSpectral);
  EXPECT_EQ(s.factor.denominator(), 2);
  EXPECT_DOUBLE_EQ(s.factor.k(), 0.5);
  EXPECT_EQ(s.to_string(), "spectral:2");
  EXPECT_EQ(CompressionSpec::parse("AVG-MAX:10").to_string(), "avgmax:10");
  EXPECT_EQ(CompressionSpec::parse("avg_max:3").method, PoolMethod::kAvgMax);
  for (auto m : kAllMethods) {
    const CompressionSpec spec{m, k(4)};
    EXPECT_EQ(CompressionSpec::parse(spec.to_string()), spec);
  }
}

TEST(CompressionSpec, RejectsMalformedText) {
  for (const char* bad : {"", "avg", "avg:", ":2", "avg:x", "avg:2.5", "avg:1", "avg:0", "avg:-2", "median:2",
                          "avg:2:3", "avg: 2"}) {
    EXPECT_SIMPF_ERROR(CompressionSpec::parse(bad), ErrorKind::kConfig);
  }
  EXPECT_SIMPF_ERROR(CompressionFactor(1), ErrorKind::kConfig);
  EXPECT_SIMPF_ERROR(parse_pool_method("mean"), ErrorKind::kConfig);
}

TEST(CompressionFactor, FloorOfKT) {
  EXPECT_EQ(k(2).output_frames(1379), 689u);
  EXPECT_EQ(k(4).output_frames(1379), 344u);
  EXPECT_EQ(k(10).output_frames(51), 5u);
  EXPECT_EQ(k(3).output_frames(2), 0u);
}

// ------------------------------------------------------------ spec examples

TEST(PoolMax, Examples) {
  EXPECT_EQ(pool_max(row({1, 3, 2, 4}), k(2)), row({3, 4}));
  EXPECT_EQ(pool_max(M(2, 4, {5, 5, 5, 5, 1, 1, 1, 1}), k(4)), M(2, 1, {5, 1}));
}

TEST(PoolAvg, Examples) {
  EXPECT_EQ(pool_avg(row({1, 3, 2, 4}), k(2)), row({2, 3}));
  EXPECT_EQ(pool_avg(row({2, 4, 6, 8}), k(4)), row({5}));
}

TEST(PoolAvgMax, Examples) {
  EXPECT_EQ(pool_avg_max(row({1, 3, 2, 4}), k(2)), row({5, 7}));
  EXPECT_EQ(pool_avg_max(M(3, 9, 1.25), k(3)), M(3, 3, 2.5));
}

TEST(PoolUniform, Examples) {
  EXPECT_EQ(pool_uniform(row({1, 3, 2, 4}), k(2)), row({1, 2}));
  EXPECT_EQ(pool_uniform(row({1, 3, 2, 4}), k(4)), row({1}));
}

TEST(PoolSpectral, ConstantRowSurvives) {
  for (int den : {2, 3, 4, 5, 10}) {
    for (std::size_t t : {10u, 11u, 37u, 64u}) {
      const auto out = pool_spectral(M(2, t, -3.75), k(den));
      ASSERT_EQ(out.cols(), t / static_cast<std::size_t>(den));
      for (double v : out.values()) EXPECT_NEAR(v, -3.75, 1e-9) << den << " " << t;
    }
  }
}

TEST(PoolSpectral, CosineAtBinOne) {
  std::vector<double> x(8);
  for (std::size_t t = 0; t < 8; ++t) x[t] = std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / 8.0);
  const auto out = pool_spectral(row(x), k(2));
  expect_near(out, row({1, 0, -1, 0}), 1e-9);
}

TEST(PoolSpectral, NyquistIsCroppedOut) {
  const auto out = pool_spectral(row({1, -1, 1, -1, 1, -1, 1, -1}), k(2));
  expect_near(out, row({0, 0, 0, 0}), 1e-9);
}

TEST(Compress, DispatchExamples) {
  EXPECT_EQ(compress(row({1, 3, 2, 4}), CompressionSpec{PoolMethod::kMax, k(2)}), row({3, 4}));
  const auto out = compress(M(64, 1379, 0.0), CompressionSpec{PoolMethod::kUniform, k(4)});
  EXPECT_EQ(out.rows(), 64u);
  EXPECT_EQ(out.cols(), 344u);
}

TEST(Compress, DispatchIsTransparent) {
  std::mt19937_64 rng(1);
  const auto x = oracle::random_matrix(5, 23, rng);
  EXPECT_EQ(compress(x, {PoolMethod::kMax, k(3)}), pool_max(x, k(3)));
  EXPECT_EQ(compress(x, {PoolMethod::kAvg, k(3)}), pool_avg(x, k(3)));
  EXPECT_EQ(compress(x, {PoolMethod::kAvgMax, k(3)}), pool_avg_max(x, k(3)));
  EXPECT_EQ(compress(x, {PoolMethod::kSpectral, k(3)}), pool_spectral(x, k(3)));
  EXPECT_EQ(compress(x, {PoolMethod::kUniform, k(3)}), pool_uniform(x, k(3)));
}

TEST(Compress, MelOverloadCarriesProvenance) {
  std::mt19937_64 rng(4);
  MelSpectrogram mel{oracle::random_matrix(64, 51, rng), {}, 16000};
  for (auto m : kAllMethods) {
    const CompressionSpec spec{m, k(2)};
    const auto c = compress(mel, spec);
    EXPECT_EQ(c.spec, spec);
    EXPECT_EQ(c.original_frames, 51u);
    EXPECT_EQ(c.n_mels(), 64u);
    EXPECT_EQ(c.n_frames(), 25u);
    EXPECT_EQ(c.data, compress(mel.data, spec));
  }
  EXPECT_EQ(pool_avg(mel, k(2)).data, pool_avg(mel.data, k(2)));
  EXPECT_EQ(pool_spectral(mel, k(5)).spec.method, PoolMethod::kSpectral);
}

// ------------------------------------------------------------ oracle comparisons

TEST(PoolOracle, RandomFourByTwelveAtOneThird) {
  std::mt19937_64 rng(12);
  const auto x = oracle::random_matrix(4, 12, rng);
  EXPECT_EQ(pool_max(x, k(3)), oracle::window_max(x, 3));
  expect_near(pool_avg(x, k(3)), oracle::window_mean(x, 3), 1e-12);
  EXPECT_EQ(pool_avg_max(x, k(3)), [&] {
    M s = pool_max(x, k(3));
    const M a = pool_avg(x, k(3));
    for (std::size_t i = 0; i < s.size(); ++i) s.values()[i] += a.values()[i];
    return s;
  }());
  const auto u = pool_uniform(x, k(3));
  for (std::size_t f = 0; f < 4; ++f)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(u(f, j), x(f, 3 * j));
  expect_near(pool_spectral(x, k(3)), oracle::spectral(x, 3), 1e-9);
}

TEST(PoolOracle, RandomShapesAndFactors) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> rows(1, 16), cols(4, 64);
  const int dens[] = {2, 3, 4, 5, 10};
  for (int trial = 0; trial < 200; ++trial) {
    const int den = dens[trial % 5];
    std::size_t t = cols(rng);
    if (t < static_cast<std::size_t>(den)) t = static_cast<std::size_t>(den);
    const auto x = oracle::random_matrix(rows(rng), t, rng);
    const auto m = static_cast<std::size_t>(den);
    ASSERT_EQ(pool_max(x, k(den)), oracle::window_max(x, m));
    ASSERT_EQ(pool_avg(x, k(den)), oracle::window_mean(x, m));
    ASSERT_EQ(pool_uniform(x, k(den)), oracle::window_first(x, m));
    ASSERT_LE(oracle::max_abs_diff(pool_spectral(x, k(den)), oracle::spectral(x, m)), 1e-9);
  }
}

// ------------------------------------------------------------ properties

TEST(PoolProperties, ShapeLawForEveryMethod) {
  std::mt19937_64 rng(5);
  for (int den : {2, 3, 4, 5, 7, 10}) {
    for (std::size_t t = static_cast<std::size_t>(den); t < 50; t += 3) {
      const auto x = oracle::random_matrix(3, t, rng);
      for (auto m : kAllMethods) {
        const auto out = compress(x, {m, k(den)});
        EXPECT_EQ(out.rows(), 3u);
        EXPECT_EQ(out.cols(), t / static_cast<std::size_t>(den));
      }
    }
  }
}

TEST(PoolProperties, TooShortInputNamesFloorKT) {
  for (auto m : kAllMethods) {
    try {
      compress(M(4, 3, 1.0), {m, k(4)});
      ADD_FAILURE() << "expected input-too-short for " << to_string(m);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kInputTooShort);
      EXPECT_NE(std::string(e.what()).find("floor(kT) = 0"), std::string::npos) << e.what();
    }
  }
}

TEST(PoolProperties, OrderRelations) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = oracle::random_matrix(4, 30, rng);
    for (int den : {2, 3, 5}) {
      const auto mx = pool_max(x, k(den));
      const auto av = pool_avg(x, k(den));
      const auto am = pool_avg_max(x, k(den));
      for (std::size_t i = 0; i < mx.size(); ++i) {
        EXPECT_GE(mx.values()[i], av.values()[i]);
        EXPECT_EQ(am.values()[i], mx.values()[i] + av.values()[i]);
      }
    }
  }
}

TEST(PoolProperties, RowPermutationEquivariance) {
  std::mt19937_64 rng(7);
  const auto x = oracle::random_matrix(9, 40, rng);
  std::vector<std::size_t> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  M px(9, 40);
  for (std::size_t r = 0; r < 9; ++r) std::copy(x.row(perm[r]).begin(), x.row(perm[r]).end(), px.row(r).begin());
  for (auto m : kAllMethods) {
    const auto a = compress(x, {m, k(4)});
    const auto b = compress(px, {m, k(4)});
    for (std::size_t r = 0; r < 9; ++r)
      for (std::size_t c = 0; c < a.cols(); ++c) EXPECT_EQ(b(r, c), a(perm[r], c)) << to_string(m);
  }
}

TEST(PoolProperties, SpectralEnergyBound) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> cols(4, 64);
  for (int trial = 0; trial < 300; ++trial) {
    const int den = 2 + trial % 4;
    const auto x = oracle::random_matrix(1, std::max<std::size_t>(cols(rng), 5), rng);
    const auto y = pool_spectral(x, k(den));
    double ein = 0.0, eout = 0.0;
    for (double v : x.values()) ein += v * v;
    for (double v : y.values()) eout += v * v;
    EXPECT_LE(eout * den, ein + 1e-9);
  }
}

TEST(PoolProperties, UniformComposes) {
  std::mt19937_64 rng(9);
  const auto x = oracle::random_matrix(3, 60, rng);
  EXPECT_EQ(pool_uniform(pool_uniform(x, k(2)), k(3)), pool_uniform(x, k(6)));
  EXPECT_EQ(pool_uniform(pool_uniform(x, k(5)), k(4)), pool_uniform(x, k(20)));
}

TEST(PoolProperties, RemainderFramesAreIgnored) {
  std::mt19937_64 rng(10);
  const auto x = oracle::random_matrix(3, 24, rng);
  for (int den : {2, 3, 4, 6}) {
    for (std::size_t extra = 1; extra < static_cast<std::size_t>(den); ++extra) {
      M longer(3, 24 + extra);
      for (std::size_t r = 0; r < 3; ++r) {
        std::copy(x.row(r).begin(), x.row(r).end(), longer.row(r).begin());
        for (std::size_t e = 0; e < extra; ++e) longer(r, 24 + e) = 1e6 * static_cast<double>(e + 1);
      }
      EXPECT_EQ(pool_max(longer, k(den)), pool_max(x, k(den)));
      EXPECT_EQ(pool_avg(longer, k(den)), pool_avg(x, k(den)));
      EXPECT_EQ(pool_uniform(longer, k(den)), pool_uniform(x, k(den)));
    }
  }
}

// ------------------------------------------------------------ time-axis spectrum

TEST(TimeAxisSpectrum, RoundTripAndShiftInverse) {
  std::mt19937_64 rng(11);
  for (std::size_t t : {1u, 2u, 7u, 8u, 51u}) {
    const auto x = oracle::random_matrix(3, t, rng);
    const auto s = time_axis_dft(x);
    EXPECT_FALSE(s.shifted);
    EXPECT_LE(oracle::max_abs_diff(time_axis_idft(s), x), 1e-9);
    const auto shifted = fftshift(s);
    EXPECT_TRUE(shifted.shifted);
    EXPECT_LE(oracle::max_abs_diff(time_axis_idft(shifted), x), 1e-9);
    EXPECT_EQ(ifftshift(shifted).coeffs, s.coeffs);
    EXPECT_EQ(fftshift(shifted).coeffs, shifted.coeffs);  // idempotent on a shifted spectrum
  }
}

TEST(TimeAxisSpectrum, ShiftPlacesDcAtCentre) {
  for (std::size_t t : {6u, 7u}) {
    M x(1, t, 1.0);
    const auto s = fftshift(time_axis_dft(x));
    EXPECT_NEAR(std::abs(s.coeffs(0, t / 2)), static_cast<double>(t), 1e-12);
    for (std::size_t i = 0; i < t; ++i)
      if (i != t / 2) EXPECT_NEAR(std::abs(s.coeffs(0, i)), 0.0, 1e-12);
  }
}

TEST(TimeAxisSpectrum, MatchesNaiveDft) {
  std::mt19937_64 rng(13);
  const auto x = oracle::random_matrix(2, 13, rng);
  const auto s = time_axis_dft(x);
  for (std::size_t f = 0; f < 2; ++f) {
    const auto ref = oracle::naive_dft(x.row(f));
    for (std::size_t i = 0; i < 13; ++i) EXPECT_LT(std::abs(s.coeffs(f, i) - ref[i]), 1e-10);
  }
}
