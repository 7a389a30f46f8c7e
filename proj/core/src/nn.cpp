#include "simpf/nn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <type_traits>

#include "simpf/container.hpp"
#include "simpf/error.hpp"

namespace simpf::nn {
namespace {

constexpr std::size_t kTaps = kKernel * kKernel;

template <typename T>
struct Activations {
  std::size_t h = 0, w = 0;    // input
  std::size_t h2 = 0, w2 = 0;  // after pooling
  std::vector<T> x;            // normalized input, 1 x h x w
  std::vector<T> r1;           // ReLU(conv1), 8 x h x w
  std::vector<T> p1;           // maxpool(r1), 8 x h2 x w2
  std::vector<std::uint32_t> p1_arg;  // flat index into r1 for each p1 entry
  std::vector<T> r2;           // ReLU(conv2), 16 x h2 x w2
  std::vector<T> g;            // global average of r2, 16
  std::vector<T> logits;
};

// 3x3 cross-correlation with zero "same" padding, stride 1.
template <typename T>
void conv3x3(std::span<const T> in, std::size_t c_in, std::size_t h, std::size_t w,
             std::span<const T> weights, std::span<const T> bias, std::size_t c_out, std::span<T> out) {
  const std::size_t plane = h * w;
  for (std::size_t co = 0; co < c_out; ++co) {
    T* dst = out.data() + co * plane;
    std::fill(dst, dst + plane, bias[co]);
    for (std::size_t ci = 0; ci < c_in; ++ci) {
      const T* src = in.data() + ci * plane;
      const T* kern = weights.data() + (co * c_in + ci) * kTaps;
      for (std::size_t ky = 0; ky < kKernel; ++ky) {
        const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(ky) - 1;
        const std::size_t y0 = dy < 0 ? 1 : 0;
        const std::size_t y1 = dy > 0 ? h - 1 : h;
        for (std::size_t kx = 0; kx < kKernel; ++kx) {
          const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kx) - 1;
          const std::size_t x0 = dx < 0 ? 1 : 0;
          const std::size_t x1 = dx > 0 ? w - 1 : w;
          const T k = kern[ky * kKernel + kx];
          for (std::size_t y = y0; y < y1; ++y) {
            T* d = dst + y * w;
            const T* s = src + (y + dy) * w + dx;
            for (std::size_t x = x0; x < x1; ++x) d[x] += k * s[x];
          }
        }
      }
    }
  }
}

// Accumulates weight/bias gradients and, when d_in is non-empty, the input gradient.
template <typename T>
void conv3x3_backward(std::span<const T> in, std::size_t c_in, std::size_t h, std::size_t w,
                      std::span<const T> weights, std::span<const T> d_out, std::size_t c_out,
                      std::span<T> d_weights, std::span<T> d_bias, std::span<T> d_in) {
  const std::size_t plane = h * w;
  for (std::size_t co = 0; co < c_out; ++co) {
    const T* g = d_out.data() + co * plane;
    T bsum = 0;
#pragma omp simd reduction(+ : bsum)
    for (std::size_t i = 0; i < plane; ++i) bsum += g[i];
    d_bias[co] += bsum;
    for (std::size_t ci = 0; ci < c_in; ++ci) {
      const T* src = in.data() + ci * plane;
      T* dsrc = d_in.empty() ? nullptr : d_in.data() + ci * plane;
      const std::size_t widx = (co * c_in + ci) * kTaps;
      for (std::size_t ky = 0; ky < kKernel; ++ky) {
        const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(ky) - 1;
        const std::size_t y0 = dy < 0 ? 1 : 0;
        const std::size_t y1 = dy > 0 ? h - 1 : h;
        for (std::size_t kx = 0; kx < kKernel; ++kx) {
          const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kx) - 1;
          const std::size_t x0 = dx < 0 ? 1 : 0;
          const std::size_t x1 = dx > 0 ? w - 1 : w;
          const T k = weights[widx + ky * kKernel + kx];
          T acc = 0;
          for (std::size_t y = y0; y < y1; ++y) {
            const T* gy = g + y * w;
            const T* s = src + (y + dy) * w + dx;
#pragma omp simd reduction(+ : acc)
            for (std::size_t x = x0; x < x1; ++x) acc += gy[x] * s[x];
            if (dsrc) {
              T* ds = dsrc + (y + dy) * w + dx;
              for (std::size_t x = x0; x < x1; ++x) ds[x] += k * gy[x];
            }
          }
          d_weights[widx + ky * kKernel + kx] += acc;
        }
      }
    }
  }
}

template <typename T>
void check_input(const Matrix<T>& input) {
  if (input.rows() < kMinInputSize || input.cols() < kMinInputSize) {
    throw Error(ErrorKind::kInputTooShort,
                "classifier needs at least " + std::to_string(kMinInputSize) + "x" +
                    std::to_string(kMinInputSize) + " input, got " + std::to_string(input.rows()) + "x" +
                    std::to_string(input.cols()));
  }
}

template <typename T>
Activations<T> run_forward(const BasicTinyCnn<T>& model, const Matrix<T>& input) {
  check_input(input);
  const auto& p = model.params();
  Activations<T> a;
  a.h = input.rows();
  a.w = input.cols();
  a.h2 = a.h / 2;
  a.w2 = a.w / 2;

  const T mean = static_cast<T>(model.input_norm().center);
  const T inv_std = static_cast<T>(model.input_norm().inv_scale);
  a.x.resize(a.h * a.w);
  const auto src = input.values();
  for (std::size_t i = 0; i < a.x.size(); ++i) a.x[i] = (src[i] - mean) * inv_std;

  a.r1.resize(kConv1Channels * a.h * a.w);
  conv3x3<T>(a.x, 1, a.h, a.w, p.conv1_w, p.conv1_b, kConv1Channels, a.r1);
  for (T& v : a.r1) v = std::max(v, T{0});

  a.p1.resize(kConv1Channels * a.h2 * a.w2);
  a.p1_arg.resize(a.p1.size());
  for (std::size_t c = 0; c < kConv1Channels; ++c) {
    for (std::size_t y = 0; y < a.h2; ++y) {
      for (std::size_t x = 0; x < a.w2; ++x) {
        std::size_t best = (c * a.h + 2 * y) * a.w + 2 * x;
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = (c * a.h + 2 * y + dy) * a.w + 2 * x + dx;
            if (a.r1[idx] > a.r1[best]) best = idx;
          }
        }
        const std::size_t out = (c * a.h2 + y) * a.w2 + x;
        a.p1[out] = a.r1[best];
        a.p1_arg[out] = static_cast<std::uint32_t>(best);
      }
    }
  }

  const std::size_t plane2 = a.h2 * a.w2;
  a.r2.resize(kConv2Channels * plane2);
  conv3x3<T>(a.p1, kConv1Channels, a.h2, a.w2, p.conv2_w, p.conv2_b, kConv2Channels, a.r2);
  for (T& v : a.r2) v = std::max(v, T{0});

  a.g.assign(kConv2Channels, T{0});
  for (std::size_t c = 0; c < kConv2Channels; ++c) {
    T sum = 0;
    for (std::size_t i = 0; i < plane2; ++i) sum += a.r2[c * plane2 + i];
    a.g[c] = sum / static_cast<T>(plane2);
  }

  const std::size_t n = model.n_classes();
  a.logits.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    T acc = p.fc_b[k];
    for (std::size_t j = 0; j < kConv2Channels; ++j) acc += p.fc_w[k * kConv2Channels + j] * a.g[j];
    a.logits[k] = acc;
  }
  return a;
}

template <typename T>
void run_backward(const BasicTinyCnn<T>& model, const Activations<T>& a, std::span<const T> d_logits,
                  ParameterSet<T>& grads) {
  const auto& p = model.params();
  const std::size_t n = model.n_classes();
  std::vector<T> d_g(kConv2Channels, T{0});
  for (std::size_t k = 0; k < n; ++k) {
    grads.fc_b[k] += d_logits[k];
    for (std::size_t j = 0; j < kConv2Channels; ++j) {
      grads.fc_w[k * kConv2Channels + j] += d_logits[k] * a.g[j];
      d_g[j] += p.fc_w[k * kConv2Channels + j] * d_logits[k];
    }
  }

  const std::size_t plane2 = a.h2 * a.w2;
  std::vector<T> d_r2(a.r2.size());
  for (std::size_t c = 0; c < kConv2Channels; ++c) {
    const T share = d_g[c] / static_cast<T>(plane2);
    for (std::size_t i = 0; i < plane2; ++i) {
      d_r2[c * plane2 + i] = a.r2[c * plane2 + i] > 0 ? share : T{0};
    }
  }

  std::vector<T> d_p1(a.p1.size(), T{0});
  conv3x3_backward<T>(a.p1, kConv1Channels, a.h2, a.w2, p.conv2_w, d_r2, kConv2Channels, grads.conv2_w,
                      grads.conv2_b, d_p1);

  std::vector<T> d_r1(a.r1.size(), T{0});
  for (std::size_t i = 0; i < d_p1.size(); ++i) {
    const std::uint32_t idx = a.p1_arg[i];
    if (a.r1[idx] > 0) d_r1[idx] += d_p1[i];
  }
  conv3x3_backward<T>(a.x, 1, a.h, a.w, p.conv1_w, d_r1, kConv1Channels, grads.conv1_w, grads.conv1_b,
                      std::span<T>{});
}

template <typename T>
Matrix<T> to_matrix(const Matrix<double>& m) {
  if constexpr (std::is_same_v<T, double>) {
    return m;
  } else {
    Matrix<T> out(m.rows(), m.cols());
    std::transform(m.values().begin(), m.values().end(), out.values().begin(),
                   [](double v) { return static_cast<T>(v); });
    return out;
  }
}

std::size_t argmax(std::span<const float> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

void check_finite(const ParameterSet<float>& p, std::size_t epoch, std::size_t step) {
  for (const auto& t : p.tensors()) {
    for (float v : t) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kConfig, "training diverged at epoch " + std::to_string(epoch) + " step " +
                                            std::to_string(step) + "; lower the learning rate");
      }
    }
  }
}

// Median / scaled-MAD standardization. Most of a log-mel matrix is noise
// floor, so this centres the floor at zero and measures every value in units
// of floor fluctuation.
InputNorm fit_norm(std::span<const LabeledInput<float>> inputs) {
  std::vector<float> values;
  for (const auto& in : inputs) values.insert(values.end(), in.features.values().begin(), in.features.values().end());
  InputNorm norm;
  norm.fitted = true;
  if (values.empty()) return norm;
  const auto median_of = [](std::vector<float>& v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return static_cast<double>(*mid);
  };
  norm.center = median_of(values);
  for (float& v : values) v = static_cast<float>(std::abs(v - norm.center));
  const double sigma = 1.4826 * median_of(values);
  norm.inv_scale = sigma > 0.0 ? 1.0 / sigma : 1.0;
  return norm;
}

}  // namespace

template <typename T>
ParameterSet<T>::ParameterSet(std::size_t n_classes)
    : conv1_w(kConv1Channels * 1 * kTaps),
      conv1_b(kConv1Channels),
      conv2_w(kConv2Channels * kConv1Channels * kTaps),
      conv2_b(kConv2Channels),
      fc_w(n_classes * kConv2Channels),
      fc_b(n_classes) {}

template <typename T>
std::array<std::span<T>, 6> ParameterSet<T>::tensors() {
  return {conv1_w, conv1_b, conv2_w, conv2_b, fc_w, fc_b};
}

template <typename T>
std::array<std::span<const T>, 6> ParameterSet<T>::tensors() const {
  return {conv1_w, conv1_b, conv2_w, conv2_b, fc_w, fc_b};
}

template <typename T>
std::size_t ParameterSet<T>::count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.size();
  return n;
}

template <typename T>
BasicTinyCnn<T> BasicTinyCnn<T>::initialized(std::size_t n_classes, std::uint64_t seed) {
  if (n_classes == 0) throw Error(ErrorKind::kConfig, "classifier needs at least one class");
  BasicTinyCnn model(n_classes);
  std::mt19937_64 rng(seed);
  const auto he = [&rng](std::span<T> w, std::size_t fan_in) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    for (T& v : w) v = static_cast<T>(dist(rng));
  };
  he(model.params_.conv1_w, kTaps);
  he(model.params_.conv2_w, kConv1Channels * kTaps);
  he(model.params_.fc_w, kConv2Channels);
  return model;
}

template <typename T>
template <typename U>
BasicTinyCnn<U> BasicTinyCnn<T>::cast() const {
  BasicTinyCnn<U> out(n_classes());
  auto dst = out.params().tensors();
  const auto src = params_.tensors();
  for (std::size_t i = 0; i < src.size(); ++i) {
    std::transform(src[i].begin(), src[i].end(), dst[i].begin(), [](T v) { return static_cast<U>(v); });
  }
  out.input_norm() = norm_;
  return out;
}

template <typename T>
std::vector<T> forward(const BasicTinyCnn<T>& model, const Matrix<T>& input) {
  return run_forward(model, input).logits;
}

std::vector<float> forward(const TinyCnnModel& model, const MelSpectrogram& x) {
  return forward(model, to_matrix<float>(x.data));
}

std::vector<float> forward(const TinyCnnModel& model, const CompressedSpectrogram& x) {
  return forward(model, to_matrix<float>(x.data));
}

template <typename T>
std::vector<T> softmax(std::span<const T> logits) {
  std::vector<T> out(logits.size());
  if (logits.empty()) return out;
  const T peak = *std::max_element(logits.begin(), logits.end());
  T total = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (T& v : out) v /= total;
  return out;
}

template <typename T>
LossAndGrads<T> loss_and_grads(const BasicTinyCnn<T>& model, std::span<const LabeledInput<T>> batch) {
  if (batch.empty()) throw Error(ErrorKind::kPrecondition, "loss_and_grads: empty batch");
  LossAndGrads<T> out{0.0, 0, ParameterSet<T>(model.n_classes())};
  const T inv_batch = T{1} / static_cast<T>(batch.size());
  std::vector<T> d_logits(model.n_classes());
  for (const auto& item : batch) {
    if (item.label.index >= model.n_classes()) {
      throw Error(ErrorKind::kPrecondition, "label " + std::to_string(item.label.index) + " out of range");
    }
    const Activations<T> a = run_forward(model, item.features);
    const auto probs = softmax<T>(a.logits);
    // log-sum-exp form keeps the loss finite when a probability underflows.
    const T peak = *std::max_element(a.logits.begin(), a.logits.end());
    T lse = 0;
    for (T v : a.logits) lse += std::exp(v - peak);
    out.loss += static_cast<double>(peak + std::log(lse) - a.logits[item.label.index]);
    const auto best = std::max_element(a.logits.begin(), a.logits.end()) - a.logits.begin();
    out.correct += static_cast<std::size_t>(best) == item.label.index ? 1 : 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      d_logits[k] = (probs[k] - (k == item.label.index ? T{1} : T{0})) * inv_batch;
    }
    run_backward(model, a, std::span<const T>(d_logits), out.grads);
  }
  out.loss /= static_cast<double>(batch.size());
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::kConfig, "learning rate must be finite and non-negative");
  }
  if (batch_size == 0) throw Error(ErrorKind::kConfig, "batch size must be positive");
  if (epochs == 0) throw Error(ErrorKind::kConfig, "epochs must be positive");
}

std::vector<LabeledInput<float>> prepare_inputs(std::span<const LabeledClip> dataset,
                                                const std::optional<CompressionSpec>& frontend,
                                                const SpectrogramConfig& cfg) {
  std::vector<LabeledInput<float>> out;
  out.reserve(dataset.size());
  std::optional<MelExtractor> extractor;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& item = dataset[i];
    try {
      if (!extractor || extractor->sample_rate() != item.clip.sample_rate) {
        extractor.emplace(cfg, item.clip.sample_rate);
      }
      const MelSpectrogram mel = (*extractor)(item.clip);
      Matrix<double> x = frontend ? compress(mel.data, *frontend) : mel.data;
      out.push_back({to_matrix<float>(x), item.label});
    } catch (const Error& e) {
      throw Error(e.kind(), "clip " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::size_t predict(const TinyCnnModel& model, const Matrix<float>& input) {
  return argmax(forward(model, input));
}

double evaluate(const TinyCnnModel& model, std::span<const LabeledInput<float>> inputs) {
  if (inputs.empty()) throw Error(ErrorKind::kPrecondition, "evaluate: empty dataset");
  std::size_t correct = 0;
  for (const auto& in : inputs) correct += predict(model, in.features) == in.label.index ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(inputs.size());
}

double evaluate(const TinyCnnModel& model, std::span<const LabeledClip> dataset,
                const std::optional<CompressionSpec>& frontend, const SpectrogramConfig& cfg) {
  if (dataset.empty()) throw Error(ErrorKind::kPrecondition, "evaluate: empty dataset");
  const auto inputs = prepare_inputs(dataset, frontend, cfg);
  return evaluate(model, inputs);
}

TrainResult train(TinyCnnModel model, std::span<const LabeledInput<float>> train_inputs, const TrainConfig& cfg,
                  std::span<const LabeledInput<float>> test_inputs) {
  cfg.validate();
  if (train_inputs.empty()) throw Error(ErrorKind::kPrecondition, "train: empty dataset");
  if (!model.input_norm().fitted) model.input_norm() = fit_norm(train_inputs);

  TrainResult result{std::move(model), {}};
  TinyCnnModel& m = result.model;
  std::vector<std::size_t> order(train_inputs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);
  std::vector<LabeledInput<float>> batch;
  const auto lr = static_cast<float>(cfg.learning_rate);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::size_t step = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++step) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(train_inputs[order[i]]);
      const auto lg = loss_and_grads<float>(m, batch);
      correct += lg.correct;
      loss_sum += lg.loss * static_cast<double>(batch.size());
      auto params = m.params().tensors();
      const auto grads = lg.grads.tensors();
      for (std::size_t t = 0; t < params.size(); ++t) {
        for (std::size_t i = 0; i < params[t].size(); ++i) params[t][i] -= lr * grads[t][i];
      }
      check_finite(m.params(), epoch, step);
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_sum / static_cast<double>(order.size());
    stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    if (!test_inputs.empty()) stats.test_accuracy = evaluate(m, test_inputs);
    result.history.push_back(stats);
  }
  return result;
}

TrainResult train(TinyCnnModel model, std::span<const LabeledClip> dataset,
                  const std::optional<CompressionSpec>& frontend, const TrainConfig& cfg,
                  std::span<const LabeledClip> test_set) {
  cfg.validate();
  if (dataset.empty()) throw Error(ErrorKind::kPrecondition, "train: empty dataset");
  const auto train_inputs = prepare_inputs(dataset, frontend, cfg.spectrogram);
  const auto test_inputs = prepare_inputs(test_set, frontend, cfg.spectrogram);
  return train(std::move(model), train_inputs, cfg, test_inputs);
}

flops::ArchSpec tiny_cnn_arch(std::size_t n_classes, std::size_t n_mels) {
  using flops::LayerKind;
  using flops::Padding;
  const auto c1 = static_cast<std::uint32_t>(kConv1Channels);
  const auto c2 = static_cast<std::uint32_t>(kConv2Channels);
  flops::ArchSpec arch;
  arch.name = "TinyCNN";
  arch.input_channels = 1;
  arch.input_height = static_cast<std::uint32_t>(n_mels);
  arch.layers = {
      {LayerKind::kConv2d, 3, 3, 1, c1, 1, 1, Padding::kSame},
      {LayerKind::kActivation, 1, 1, c1, c1, 1, 1, Padding::kSame},
      {LayerKind::kPool2d, 2, 2, c1, c1, 2, 2, Padding::kValid},
      {LayerKind::kConv2d, 3, 3, c1, c2, 1, 1, Padding::kSame},
      {LayerKind::kActivation, 1, 1, c2, c2, 1, 1, Padding::kSame},
      {LayerKind::kGlobalPool, 1, 1, c2, c2, 1, 1, Padding::kSame},
      {LayerKind::kLinear, 1, 1, c2, static_cast<std::uint32_t>(n_classes), 1, 1, Padding::kSame},
  };
  return arch;
}

namespace {

constexpr char kCheckpointMagic[8] = {'S', 'I', 'M', 'P', 'F', 'C', 'N', 'N'};

std::vector<std::vector<std::uint32_t>> tensor_shapes(std::size_t n_classes) {
  const auto c1 = static_cast<std::uint32_t>(kConv1Channels);
  const auto c2 = static_cast<std::uint32_t>(kConv2Channels);
  const auto k = static_cast<std::uint32_t>(kKernel);
  const auto n = static_cast<std::uint32_t>(n_classes);
  return {{c1, 1, k, k}, {c1}, {c2, c1, k, k}, {c2}, {n, c2}, {n}};
}

void put(std::vector<std::uint8_t>& out, std::uint64_t v, int width) {
  for (int i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

std::vector<std::uint8_t> serialize(const TinyCnnModel& model) {
  std::vector<std::uint8_t> out(kCheckpointMagic, kCheckpointMagic + 8);
  put(out, model.n_classes(), 4);
  for (const auto& shape : tensor_shapes(model.n_classes())) {
    put(out, shape.size(), 4);
    for (auto d : shape) put(out, d, 4);
  }
  put(out, std::bit_cast<std::uint64_t>(model.input_norm().center), 8);
  put(out, std::bit_cast<std::uint64_t>(model.input_norm().inv_scale), 8);
  out.push_back(model.input_norm().fitted ? 1 : 0);
  for (const auto& t : model.params().tensors()) {
    for (float v : t) put(out, std::bit_cast<std::uint32_t>(v), 4);
  }
  return out;
}

TinyCnnModel deserialize_model(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const auto get = [&](int width) {
    if (bytes.size() - pos < static_cast<std::size_t>(width)) {
      throw Error(ErrorKind::kFormat, "checkpoint: truncated at offset " + std::to_string(pos));
    }
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
    pos += static_cast<std::size_t>(width);
    return v;
  };
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0) {
    throw Error(ErrorKind::kFormat, "checkpoint: bad magic");
  }
  pos = 8;
  const auto n_classes = static_cast<std::size_t>(get(4));
  if (n_classes == 0 || n_classes > 1u << 16) throw Error(ErrorKind::kFormat, "checkpoint: bad class count");
  for (const auto& shape : tensor_shapes(n_classes)) {
    if (get(4) != shape.size()) throw Error(ErrorKind::kFormat, "checkpoint: tensor rank mismatch");
    for (auto d : shape) {
      if (get(4) != d) throw Error(ErrorKind::kFormat, "checkpoint: tensor shape mismatch");
    }
  }
  TinyCnnModel model(n_classes);
  model.input_norm().center = std::bit_cast<double>(get(8));
  model.input_norm().inv_scale = std::bit_cast<double>(get(8));
  model.input_norm().fitted = get(1) != 0;
  for (auto t : model.params().tensors()) {
    for (float& v : t) v = std::bit_cast<float>(static_cast<std::uint32_t>(get(4)));
  }
  if (pos != bytes.size()) throw Error(ErrorKind::kFormat, "checkpoint: trailing bytes");
  return model;
}

void save_checkpoint(const std::filesystem::path& path, const TinyCnnModel& model) {
  write_file_bytes(path, serialize(model));
}

TinyCnnModel load_checkpoint(const std::filesystem::path& path) {
  return deserialize_model(read_file_bytes(path));
}

void write_history_csv(std::ostream& out, std::span<const EpochStats> history) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "epoch,loss,train_acc,test_acc\n";
  for (const auto& e : history) {
    out << e.epoch << ',' << e.loss << ',' << e.train_accuracy << ',';
    if (e.test_accuracy) out << *e.test_accuracy;
    out << '\n';
  }
  out.precision(old_precision);
}

template struct ParameterSet<float>;
template struct ParameterSet<double>;
template class BasicTinyCnn<float>;
template class BasicTinyCnn<double>;
template BasicTinyCnn<double> BasicTinyCnn<float>::cast<double>() const;
template BasicTinyCnn<float> BasicTinyCnn<double>::cast<float>() const;
template std::vector<float> forward(const BasicTinyCnn<float>&, const Matrix<float>&);
template std::vector<double> forward(const BasicTinyCnn<double>&, const Matrix<double>&);
template std::vector<float> softmax(std::span<const float>);
template std::vector<double> softmax(std::span<const double>);
template LossAndGrads<float> loss_and_grads(const BasicTinyCnn<float>&, std::span<const LabeledInput<float>>);
template LossAndGrads<double> loss_and_grads(const BasicTinyCnn<double>&, std::span<const LabeledInput<double>>);

}  // namespace simpf::nn
