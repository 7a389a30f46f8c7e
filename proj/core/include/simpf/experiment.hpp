#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "simpf/nn.hpp"
#include "simpf/pooling.hpp"
#include "simpf/synth.hpp"

namespace simpf::nn {

// One run of the synthetic trade-off demo: train on a fresh synthetic set,
// score a disjoint test set, and measure the classifier FLOPs with and
// without the front-end.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::optional<CompressionSpec> frontend;
  std::size_t train_per_class = 100;
  std::size_t test_per_class = 50;
  // Score the test set after every epoch instead of only after the last one.
  bool track_test = false;
  SynthDatasetSpec data{};  // seed and clips_per_class are overridden
  TrainConfig train{};      // seed is overridden
};

// Test-set generator seed for a run seeded with `seed`.
inline constexpr std::uint64_t kTestSeedOffset = 1000003;

struct ExperimentResult {
  TrainResult training;
  double test_accuracy = 0.0;
  std::size_t input_frames = 0;  // frames reaching the classifier
  std::size_t baseline_frames = 0;
  std::uint64_t model_flops = 0;
  std::uint64_t baseline_flops = 0;
  double flops_ratio = 1.0;  // model_flops / baseline_flops, FLOPs-per-MAC-2
};

ExperimentResult run_synthetic_experiment(const ExperimentConfig& cfg);

}  // namespace simpf::nn
