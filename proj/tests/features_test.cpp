#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "simpf/features.hpp"
#include "test_util.hpp"

using namespace simpf;

namespace {

AudioClip tone(double hz, double seconds, std::uint32_t rate, double amp = 0.5) {
  AudioClip c{std::vector<double>(static_cast<std::size_t>(seconds * rate)), rate};
  for (std::size_t i = 0; i < c.samples.size(); ++i)
    c.samples[i] = amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate);
  return c;
}

}  // namespace

TEST(HannWindow, ClosedFormValues) {
  const auto w = hann_window(4);
  ASSERT_EQ(w.size(), 4u);
  EXPECT_NEAR(w[0], 0.0, 1e-15);
  EXPECT_NEAR(w[1], 0.5, 1e-15);
  EXPECT_NEAR(w[2], 1.0, 1e-15);
  EXPECT_NEAR(w[3], 0.5, 1e-15);
  EXPECT_EQ(hann_window(1), std::vector<double>{0.0});
  EXPECT_SIMPF_ERROR(hann_window(0), ErrorKind::kPrecondition);
}

TEST(HannWindow, PeriodicFormIsSymmetricAboutCentre) {
  const auto w = hann_window(1024);
  for (std::size_t i = 1; i < 512; ++i) EXPECT_NEAR(w[512 - i], w[512 + i], 1e-12) << i;
  EXPECT_NEAR(w[512], 1.0, 1e-15);
}

TEST(MelScale, HtkFormula) {
  EXPECT_NEAR(hz_to_mel(700.0), 2595.0 * std::log10(2.0), 1e-12);
  EXPECT_EQ(hz_to_mel(0.0), 0.0);
  for (double hz : {10.0, 440.0, 1000.0, 8000.0, 22050.0}) EXPECT_NEAR(mel_to_hz(hz_to_mel(hz)), hz, 1e-9 * hz);
}

TEST(SpectrogramConfig, Validation) {
  SpectrogramConfig ok;
  EXPECT_NO_THROW(ok.validate(16000));
  auto bad = ok;
  bad.n_fft = 1000;
  EXPECT_SIMPF_ERROR(bad.validate(16000), ErrorKind::kConfig);
  bad = ok;
  bad.hop = 0;
  EXPECT_SIMPF_ERROR(bad.validate(16000), ErrorKind::kConfig);
  bad = ok;
  bad.hop = 2048;
  EXPECT_SIMPF_ERROR(bad.validate(16000), ErrorKind::kConfig);
  bad = ok;
  bad.f_min = 9000;
  EXPECT_SIMPF_ERROR(bad.validate(16000), ErrorKind::kConfig);
  bad = ok;
  bad.f_max = 9000;
  EXPECT_SIMPF_ERROR(bad.validate(16000), ErrorKind::kConfig);
  bad = ok;
  bad.f_min = 500;
  bad.f_max = 400;
  EXPECT_SIMPF_ERROR(bad.validate(16000), ErrorKind::kConfig);
  bad = ok;
  bad.log_floor = 0.0;
  EXPECT_SIMPF_ERROR(bad.validate(16000), ErrorKind::kConfig);
  EXPECT_SIMPF_ERROR(ok.validate(0), ErrorKind::kConfig);
}

TEST(StftPower, FrameCountLaw) {
  SpectrogramConfig cfg;
  const AudioClip ten_s{std::vector<double>(441000, 0.0), 44100};
  const auto p = stft_power(ten_s, cfg);
  EXPECT_EQ(p.rows(), 513u);
  EXPECT_EQ(p.cols(), 1379u);
  for (std::size_t len : {1u, 2u, 319u, 320u, 321u, 16000u}) {
    const AudioClip c{std::vector<double>(len, 0.1), 16000};
    EXPECT_EQ(stft_power(c, cfg).cols(), len / 320 + 1) << len;
  }
}

TEST(StftPower, SilenceGivesZeroPower) {
  const AudioClip c{std::vector<double>(5000, 0.0), 16000};
  const auto p = stft_power(c, {});
  for (double v : p.values()) ASSERT_EQ(v, 0.0);
}

TEST(StftPower, EmptyClipIsPreconditionViolation) {
  EXPECT_SIMPF_ERROR(stft_power(AudioClip{{}, 16000}, {}), ErrorKind::kPrecondition);
}

TEST(StftPower, ToneArgmaxBin) {
  const auto p = stft_power(tone(1000.0, 1.0, 16000), {});
  ASSERT_EQ(p.cols(), 51u);
  const auto argmax = [&](std::size_t t) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.rows(); ++k)
      if (p(k, t) > p(best, t)) best = k;
    return best;
  };
  for (std::size_t t = 1; t + 1 < p.cols(); ++t) EXPECT_EQ(argmax(t), 64u) << "frame " << t;
  // The reflected half of an edge frame is a phase-inverted copy of the
  // sine, which notches bin 64 and splits the peak onto its neighbours.
  for (std::size_t t : {std::size_t{0}, p.cols() - 1}) {
    EXPECT_NEAR(static_cast<double>(argmax(t)), 64.0, 1.0) << "frame " << t;
    EXPECT_LT(p(64, t), p(argmax(t), t));
  }
}

TEST(StftPower, InteriorFrameMatchesNaiveDft) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(0.0, 0.3);
  AudioClip c{std::vector<double>(8000), 16000};
  for (double& v : c.samples) v = nd(rng);
  SpectrogramConfig cfg;
  const auto p = stft_power(c, cfg);
  // Frame t is centred on sample t*hop, so frame 10 spans [3200-512, 3200+512).
  const std::size_t t = 10;
  const auto w = hann_window(cfg.n_fft);
  std::vector<double> frame(cfg.n_fft);
  for (std::size_t i = 0; i < cfg.n_fft; ++i) frame[i] = c.samples[t * cfg.hop - cfg.n_fft / 2 + i] * w[i];
  const auto ref = oracle::naive_dft(frame);
  for (std::size_t k = 0; k <= cfg.n_fft / 2; ++k) EXPECT_NEAR(p(k, t), std::norm(ref[k]), 1e-9 * (1.0 + std::norm(ref[k])));
}

TEST(StftPower, EdgeFrameUsesReflectPadding) {
  AudioClip c{std::vector<double>(4000), 16000};
  for (std::size_t i = 0; i < c.samples.size(); ++i) c.samples[i] = std::cos(0.37 * static_cast<double>(i)) + 0.001 * i;
  SpectrogramConfig cfg;
  const auto p = stft_power(c, cfg);
  const auto w = hann_window(cfg.n_fft);
  std::vector<double> frame(cfg.n_fft);
  for (std::size_t i = 0; i < cfg.n_fft; ++i) {
    const long src = static_cast<long>(i) - 512;
    frame[i] = c.samples[static_cast<std::size_t>(src < 0 ? -src : src)] * w[i];  // x[-j] = x[j]
  }
  const auto ref = oracle::naive_dft(frame);
  for (std::size_t k = 0; k <= cfg.n_fft / 2; ++k) EXPECT_NEAR(p(k, 0), std::norm(ref[k]), 1e-9 * (1.0 + std::norm(ref[k])));
}

TEST(WindowedPowerSpectrum, ParsevalOverFullSpectrum) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {64u, 1024u, 100u}) {
    std::vector<double> frame(n);
    for (double& v : frame) v = u(rng);
    const auto w = hann_window(n);
    const auto power = windowed_power_spectrum(frame, w, true);
    ASSERT_EQ(power.size(), n);
    double lhs = 0.0, rhs = 0.0;
    for (double v : power) lhs += v;
    for (std::size_t i = 0; i < n; ++i) rhs += (w[i] * frame[i]) * (w[i] * frame[i]);
    EXPECT_NEAR(lhs, static_cast<double>(n) * rhs, 1e-6 * lhs) << n;
    EXPECT_EQ(windowed_power_spectrum(frame, w).size(), n / 2 + 1);
  }
  EXPECT_SIMPF_ERROR(windowed_power_spectrum(std::vector<double>(4), std::vector<double>(5)), ErrorKind::kShape);
}

TEST(MelFilterbank, ShapeAndNonNegativity) {
  const auto fb = mel_filterbank({}, 16000);
  ASSERT_EQ(fb.rows(), 64u);
  ASSERT_EQ(fb.cols(), 513u);
  for (std::size_t m = 0; m < fb.rows(); ++m) {
    bool nonzero = false;
    for (double v : fb.row(m)) {
      ASSERT_GE(v, 0.0);
      nonzero = nonzero || v > 0.0;
    }
    EXPECT_TRUE(nonzero) << m;
  }
}

TEST(MelFilterbank, PeaksFollowMelSpacing) {
  const std::uint32_t sr = 44100;
  const auto fb = mel_filterbank({}, sr);
  const double bin_hz = sr / 1024.0;
  const double top = 2595.0 * std::log10(1.0 + (sr / 2.0) / 700.0);
  std::size_t prev = 0;
  for (std::size_t m = 0; m < fb.rows(); ++m) {
    const double centre_mel = top * static_cast<double>(m + 1) / 65.0;
    const double centre_hz = 700.0 * (std::pow(10.0, centre_mel / 2595.0) - 1.0);
    const auto row = fb.row(m);
    const auto peak = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    EXPECT_LE(std::abs(static_cast<double>(peak) * bin_hz - centre_hz), bin_hz) << m;
    if (m > 0) EXPECT_GT(peak, prev) << m;
    prev = peak;
  }
}

TEST(MelFilterbank, AreaNormalization) {
  const auto fb = mel_filterbank({}, 16000);
  const double bin_hz = 16000.0 / 1024.0;
  for (std::size_t m = 32; m < 64; ++m) {  // wide filters, where the sampled triangle approximates the area
    double s = 0.0;
    for (double v : fb.row(m)) s += v;
    EXPECT_NEAR(s * bin_hz, 1.0, 0.01) << m;
  }
  SpectrogramConfig peak;
  peak.mel_norm = MelNorm::kNone;
  const auto fb1 = mel_filterbank(peak, 16000);
  for (std::size_t m = 0; m < 64; ++m) {
    const auto row = fb1.row(m);
    EXPECT_LE(*std::max_element(row.begin(), row.end()), 1.0);
    EXPECT_GT(*std::max_element(row.begin(), row.end()), 0.5);
  }
}

TEST(MelFilterbank, TooManyBandsIsConfigError) {
  SpectrogramConfig cfg;
  cfg.n_mels = 400;
  EXPECT_SIMPF_ERROR(mel_filterbank(cfg, 16000), ErrorKind::kConfig);
}

TEST(LogMel, SilenceSitsOnTheFloor) {
  const auto mel = log_mel(AudioClip{std::vector<double>(16000, 0.0), 16000});
  for (double v : mel.data.values()) ASSERT_EQ(v, std::log(1e-10));
}

TEST(LogMel, ShapeUnderDefaults) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd(0.0, 0.1);
  for (std::size_t len : {1u, 500u, 16000u, 16001u, 33333u}) {
    AudioClip c{std::vector<double>(len), 16000};
    for (double& v : c.samples) v = nd(rng);
    const auto mel = log_mel(c);
    EXPECT_EQ(mel.n_mels(), 64u);
    EXPECT_EQ(mel.n_frames(), len / 320 + 1);
    for (double v : mel.data.values()) {
      ASSERT_TRUE(std::isfinite(v));
      ASSERT_GE(v, std::log(1e-10));
    }
  }
}

TEST(LogMel, TenSecondsAt44kHz) {
  const auto mel = log_mel(tone(440.0, 10.0, 44100));
  EXPECT_EQ(mel.n_mels(), 64u);
  EXPECT_EQ(mel.n_frames(), 1379u);
}

TEST(LogMel, WhiteNoiseRowMeansAreFlat) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd(0.0, 0.1);
  const SpectrogramConfig cfg;
  const MelExtractor extract(cfg, 16000);
  std::vector<double> mean(cfg.n_mels, 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    AudioClip c{std::vector<double>(16000), 16000};
    for (double& v : c.samples) v = nd(rng);
    const auto mel = extract(c);
    for (std::size_t m = 0; m < cfg.n_mels; ++m)
      for (double v : mel.data.row(m)) mean[m] += std::exp(v);
  }
  const double top = hz_to_mel(8000.0);
  double lo = 1e300, hi = 0.0;
  for (std::size_t m = 0; m < cfg.n_mels; ++m) {
    if (mel_to_hz(top * static_cast<double>(m + 1) / 65.0) <= 100.0) continue;
    lo = std::min(lo, mean[m]);
    hi = std::max(hi, mean[m]);
  }
  EXPECT_LE(hi / lo, 1.2);
}

TEST(LogMel, ToneEnergyLandsInTheRightBand) {
  const auto mel = log_mel(tone(1000.0, 1.0, 16000));
  const auto fb = mel_filterbank({}, 16000);
  std::size_t band = 0;
  for (std::size_t m = 1; m < 64; ++m)
    if (fb(m, 64) > fb(band, 64)) band = m;
  for (std::size_t t = 0; t < mel.n_frames(); ++t) {
    std::size_t best = 0;
    for (std::size_t m = 1; m < 64; ++m)
      if (mel.data(m, t) > mel.data(best, t)) best = m;
    EXPECT_EQ(best, band) << t;
  }
}

TEST(LogMel, DeterministicAndExtractorEquivalent) {
  const auto c = tone(523.0, 0.5, 22050);
  const auto a = log_mel(c);
  const auto b = log_mel(c);
  EXPECT_EQ(a.data, b.data);
  EXPECT_EQ(MelExtractor({}, 22050)(c).data, a.data);
  EXPECT_SIMPF_ERROR(MelExtractor({}, 16000)(c), ErrorKind::kConfig);
}

TEST(LogMel, FloorIsConfigurable) {
  SpectrogramConfig cfg;
  cfg.log_floor = 1e-4;
  const auto mel = log_mel(AudioClip{std::vector<double>(1000, 0.0), 8000}, cfg);
  for (double v : mel.data.values()) ASSERT_EQ(v, std::log(1e-4));
}
