#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simpf/pooling.hpp"

namespace simpf::flops {

enum class LayerKind {
  kConv2d,
  kDepthwiseConv2d,
  kLinear,
  kBatchNorm,
  kActivation,
  kPool2d,
  kGlobalPool,
};

enum class Padding { kSame, kValid };

std::string_view to_string(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::kConv2d;
  std::uint32_t kernel_h = 1;
  std::uint32_t kernel_w = 1;
  std::uint32_t in_channels = 1;
  std::uint32_t out_channels = 1;
  std::uint32_t stride_h = 1;
  std::uint32_t stride_w = 1;
  Padding padding = Padding::kSame;
};

// Channels x height (mel bins) x width (frames).
struct Geometry {
  std::uint64_t channels = 0;
  std::uint64_t height = 0;
  std::uint64_t width = 0;

  std::uint64_t elements() const { return channels * height * width; }
  friend bool operator==(const Geometry&, const Geometry&) = default;
};

struct ArchSpec {
  std::string name;
  std::vector<LayerSpec> layers;
  std::uint32_t input_channels = 1;
  std::uint32_t input_height = 64;

  Geometry input_geometry(std::uint64_t frames) const {
    return {input_channels, input_height, frames};
  }
};

// How multiply-accumulates are counted. Elementwise layers are counted the
// same way under both conventions.
enum class CountingConvention {
  kFlopsPerMac2,   // MAC = 2 FLOPs (multiply + add)
  kMultiplyAdds,   // MAC = 1, the "multi-adds" figure common in model tables
};

std::string_view to_string(CountingConvention convention);
std::string describe(CountingConvention convention);

struct LayerCost {
  std::uint64_t flops = 0;
  Geometry output;
};

// Throws Error{kShape} when `input` is incompatible with `layer`.
LayerCost layer_flops(const LayerSpec& layer, const Geometry& input,
                      CountingConvention convention = CountingConvention::kFlopsPerMac2);

struct LayerReport {
  LayerSpec layer;
  Geometry input;
  Geometry output;
  std::uint64_t flops = 0;
};

struct FlopsReport {
  std::vector<LayerReport> layers;
  std::uint64_t total = 0;
  Geometry input;
  CountingConvention convention = CountingConvention::kFlopsPerMac2;
};

FlopsReport model_flops(const ArchSpec& arch, std::uint64_t frames,
                        CountingConvention convention = CountingConvention::kFlopsPerMac2);

struct CompareRow {
  std::optional<CompressionSpec> spec;  // empty for the baseline row
  std::uint64_t frames = 0;
  std::uint64_t flops = 0;
  double ratio = 1.0;  // flops / baseline flops

  std::string label() const { return spec ? spec->to_string() : "baseline"; }
};

// Baseline row first, then one row per spec in the given order.
std::vector<CompareRow> compare_report(const ArchSpec& arch, std::uint64_t frames,
                                       const std::vector<CompressionSpec>& specs,
                                       CountingConvention convention = CountingConvention::kFlopsPerMac2);

// Line-oriented arch format:
//   # comment
//   name <text>
//   input <channels> <mel bins>
//   <kind> k_h k_w c_in c_out stride_h stride_w [same|valid]
// kinds: conv2d, dwconv2d, linear, batchnorm, activation (relu), pool2d, globalpool.
ArchSpec parse_arch(std::string_view text);
ArchSpec load_arch(const std::filesystem::path& path);
std::string format_arch(const ArchSpec& arch);

// Checks positive dimensions, depthwise channel equality, and channel
// continuity between consecutive layers. Throws Error{kConfig}.
void validate(const ArchSpec& arch);

// PANNs-family transcriptions: 4 (CNN10) or 6 (CNN14) blocks of two 3x3
// conv + BN + ReLU, 2x2 average pooling between blocks, global pooling and
// a two-layer head with 527 outputs.
ArchSpec cnn10_like();
ArchSpec cnn14_like();

}  // namespace simpf::flops
