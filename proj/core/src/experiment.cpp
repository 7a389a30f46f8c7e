#include "simpf/experiment.hpp"

#include "simpf/error.hpp"
#include "simpf/flops.hpp"

namespace simpf::nn {

ExperimentResult run_synthetic_experiment(const ExperimentConfig& cfg) {
  if (cfg.train_per_class == 0 || cfg.test_per_class == 0) {
    throw Error(ErrorKind::kConfig, "experiment needs at least one train and one test clip per class");
  }
  SynthDatasetSpec train_spec = cfg.data;
  train_spec.seed = cfg.seed;
  train_spec.clips_per_class = cfg.train_per_class;
  SynthDatasetSpec test_spec = cfg.data;
  test_spec.seed = cfg.seed + kTestSeedOffset;
  test_spec.clips_per_class = cfg.test_per_class;

  TrainConfig tcfg = cfg.train;
  tcfg.seed = cfg.seed;
  tcfg.validate();

  const auto train_clips = synth_dataset(train_spec);
  const auto test_clips = synth_dataset(test_spec);
  const auto train_inputs = prepare_inputs(train_clips, cfg.frontend, tcfg.spectrogram);
  const auto test_inputs = prepare_inputs(test_clips, cfg.frontend, tcfg.spectrogram);

  ExperimentResult out;
  auto model = TinyCnnModel::initialized(train_spec.n_classes, cfg.seed);
  out.training = cfg.track_test ? train(std::move(model), train_inputs, tcfg, test_inputs)
                                : train(std::move(model), train_inputs, tcfg);
  out.test_accuracy = evaluate(out.training.model, test_inputs);
  if (!out.training.history.empty()) out.training.history.back().test_accuracy = out.test_accuracy;

  const std::size_t n_samples = train_clips.front().clip.samples.size();
  out.baseline_frames = tcfg.spectrogram.frames_for(n_samples);
  out.input_frames = train_inputs.front().features.cols();
  const auto arch = tiny_cnn_arch(train_spec.n_classes, tcfg.spectrogram.n_mels);
  out.baseline_flops = flops::model_flops(arch, out.baseline_frames).total;
  out.model_flops = flops::model_flops(arch, out.input_frames).total;
  out.flops_ratio = static_cast<double>(out.model_flops) / static_cast<double>(out.baseline_flops);
  return out;
}

}  // namespace simpf::nn
