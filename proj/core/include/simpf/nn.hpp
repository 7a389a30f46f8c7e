#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "simpf/features.hpp"
#include "simpf/flops.hpp"
#include "simpf/matrix.hpp"
#include "simpf/pooling.hpp"
#include "simpf/synth.hpp"

namespace simpf::nn {

inline constexpr std::size_t kConv1Channels = 8;
inline constexpr std::size_t kConv2Channels = 16;
inline constexpr std::size_t kKernel = 3;
// Smallest spectrogram side accepted by forward().
inline constexpr std::size_t kMinInputSize = 8;

// All learnable tensors of the classifier, row-major:
//   conv1_w [8][1][3][3], conv1_b [8], conv2_w [16][8][3][3], conv2_b [16],
//   fc_w [n_classes][16], fc_b [n_classes].
template <typename T>
struct ParameterSet {
  std::vector<T> conv1_w, conv1_b, conv2_w, conv2_b, fc_w, fc_b;

  explicit ParameterSet(std::size_t n_classes = 0);

  std::size_t n_classes() const { return fc_b.size(); }
  std::array<std::span<T>, 6> tensors();
  std::array<std::span<const T>, 6> tensors() const;
  std::size_t count() const;

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;
};

// Fixed affine standardization applied to every input value,
// x' = (x - center) * inv_scale. Not trained by SGD; train() fits it as the
// median and 1 / (1.4826 * MAD) of the training inputs.
struct InputNorm {
  double center = 0.0;
  double inv_scale = 1.0;
  bool fitted = false;

  friend bool operator==(const InputNorm&, const InputNorm&) = default;
};

// conv3x3(1->8) -> ReLU -> maxpool 2x2 -> conv3x3(8->16) -> ReLU
// -> global average pool -> linear(16->n_classes). Convolutions use zero
// "same" padding, pooling drops an odd trailing row/column.
template <typename T>
class BasicTinyCnn {
 public:
  explicit BasicTinyCnn(std::size_t n_classes = 4) : params_(n_classes) {}

  // He-normal weights, zero biases.
  static BasicTinyCnn initialized(std::size_t n_classes, std::uint64_t seed);

  std::size_t n_classes() const { return params_.n_classes(); }
  ParameterSet<T>& params() { return params_; }
  const ParameterSet<T>& params() const { return params_; }
  InputNorm& input_norm() { return norm_; }
  const InputNorm& input_norm() const { return norm_; }

  template <typename U>
  BasicTinyCnn<U> cast() const;

  friend bool operator==(const BasicTinyCnn&, const BasicTinyCnn&) = default;

 private:
  ParameterSet<T> params_;
  InputNorm norm_;
};

using TinyCnnModel = BasicTinyCnn<float>;

template <typename T>
struct LabeledInput {
  Matrix<T> features;  // F x T spectrogram, before InputNorm
  Label label;
};

// Throws Error{kInputTooShort} when either side is below kMinInputSize.
template <typename T>
std::vector<T> forward(const BasicTinyCnn<T>& model, const Matrix<T>& input);

std::vector<float> forward(const TinyCnnModel& model, const MelSpectrogram& x);
std::vector<float> forward(const TinyCnnModel& model, const CompressedSpectrogram& x);

template <typename T>
std::vector<T> softmax(std::span<const T> logits);

template <typename T>
struct LossAndGrads {
  double loss = 0.0;        // mean softmax cross-entropy over the batch
  std::size_t correct = 0;  // argmax hits, measured before the update
  ParameterSet<T> grads;
};

template <typename T>
LossAndGrads<T> loss_and_grads(const BasicTinyCnn<T>& model, std::span<const LabeledInput<T>> batch);

struct TrainConfig {
  double learning_rate = 1e-2;
  std::size_t batch_size = 16;
  std::size_t epochs = 30;
  std::uint64_t seed = 0;
  SpectrogramConfig spectrogram{};

  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  double train_accuracy = 0.0;
  std::optional<double> test_accuracy;
};

struct TrainResult {
  TinyCnnModel model;
  std::vector<EpochStats> history;
};

// log_mel, then `frontend` when set. Errors are re-thrown with the clip index.
std::vector<LabeledInput<float>> prepare_inputs(std::span<const LabeledClip> dataset,
                                                const std::optional<CompressionSpec>& frontend,
                                                const SpectrogramConfig& cfg = {});

// Fits InputNorm on the training inputs when the model has none, then runs
// seeded-shuffle minibatch SGD. `test_set`, when given, is scored each epoch.
TrainResult train(TinyCnnModel model, std::span<const LabeledClip> dataset,
                  const std::optional<CompressionSpec>& frontend, const TrainConfig& cfg,
                  std::span<const LabeledClip> test_set = {});

TrainResult train(TinyCnnModel model, std::span<const LabeledInput<float>> train_inputs,
                  const TrainConfig& cfg, std::span<const LabeledInput<float>> test_inputs = {});

double evaluate(const TinyCnnModel& model, std::span<const LabeledClip> dataset,
                const std::optional<CompressionSpec>& frontend, const SpectrogramConfig& cfg = {});
double evaluate(const TinyCnnModel& model, std::span<const LabeledInput<float>> inputs);

std::size_t predict(const TinyCnnModel& model, const Matrix<float>& input);

// Layer list of the classifier for the FLOPs model.
flops::ArchSpec tiny_cnn_arch(std::size_t n_classes, std::size_t n_mels = 64);

// Checkpoint: "SIMPFCNN" | u32 n_classes | 6 x (u32 rank, u32 dims...) |
// f64 norm center | f64 norm inv_scale | u8 fitted | float32 parameters in
// ParameterSet order.
std::vector<std::uint8_t> serialize(const TinyCnnModel& model);
TinyCnnModel deserialize_model(std::span<const std::uint8_t> bytes);
void save_checkpoint(const std::filesystem::path& path, const TinyCnnModel& model);
TinyCnnModel load_checkpoint(const std::filesystem::path& path);

// "epoch,loss,train_acc,test_acc"; test_acc is empty when not measured.
void write_history_csv(std::ostream& out, std::span<const EpochStats> history);

}  // namespace simpf::nn
