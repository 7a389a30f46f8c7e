#include "simpf/flops.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "simpf/error.hpp"

namespace simpf::flops {
namespace {

struct KindName {
  LayerKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 8> kKindNames = {{
    {LayerKind::kConv2d, "conv2d"},
    {LayerKind::kDepthwiseConv2d, "dwconv2d"},
    {LayerKind::kLinear, "linear"},
    {LayerKind::kBatchNorm, "batchnorm"},
    {LayerKind::kActivation, "activation"},
    {LayerKind::kActivation, "relu"},
    {LayerKind::kPool2d, "pool2d"},
    {LayerKind::kGlobalPool, "globalpool"},
}};

std::string geometry_string(const Geometry& g) {
  return std::to_string(g.channels) + "x" + std::to_string(g.height) + "x" + std::to_string(g.width);
}

[[noreturn]] void shape_error(const LayerSpec& layer, const Geometry& in, const std::string& why) {
  throw Error(ErrorKind::kShape, std::string(to_string(layer.kind)) + " on input " +
                                     geometry_string(in) + ": " + why);
}

std::uint64_t spatial_out(std::uint64_t in, std::uint32_t kernel, std::uint32_t stride, Padding padding) {
  if (padding == Padding::kSame) return (in + stride - 1) / stride;
  if (in < kernel) return 0;
  return (in - kernel) / stride + 1;
}

std::uint64_t mac_flops(std::uint64_t macs, CountingConvention convention) {
  return convention == CountingConvention::kFlopsPerMac2 ? 2 * macs : macs;
}

std::uint32_t parse_u32(std::string_view token, std::size_t line_no) {
  std::uint32_t v = 0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || end != token.data() + token.size()) {
    throw Error(ErrorKind::kConfig, "arch line " + std::to_string(line_no) + ": '" +
                                        std::string(token) + "' is not a non-negative integer");
  }
  return v;
}

LayerSpec block_conv(std::uint32_t c_in, std::uint32_t c_out) {
  return {LayerKind::kConv2d, 3, 3, c_in, c_out, 1, 1, Padding::kSame};
}

LayerSpec elementwise(LayerKind kind, std::uint32_t channels) {
  return {kind, 1, 1, channels, channels, 1, 1, Padding::kSame};
}

ArchSpec panns_like(std::string name, const std::vector<std::uint32_t>& widths, bool pool_last) {
  ArchSpec arch;
  arch.name = std::move(name);
  std::uint32_t c = 1;
  for (std::size_t b = 0; b < widths.size(); ++b) {
    const std::uint32_t w = widths[b];
    for (std::uint32_t c_in : {c, w}) {
      arch.layers.push_back(block_conv(c_in, w));
      arch.layers.push_back(elementwise(LayerKind::kBatchNorm, w));
      arch.layers.push_back(elementwise(LayerKind::kActivation, w));
    }
    if (b + 1 < widths.size() || pool_last) {
      arch.layers.push_back({LayerKind::kPool2d, 2, 2, w, w, 2, 2, Padding::kValid});
    }
    c = w;
  }
  arch.layers.push_back(elementwise(LayerKind::kGlobalPool, c));
  arch.layers.push_back({LayerKind::kLinear, 1, 1, c, c, 1, 1, Padding::kSame});
  arch.layers.push_back(elementwise(LayerKind::kActivation, c));
  arch.layers.push_back({LayerKind::kLinear, 1, 1, c, 527, 1, 1, Padding::kSame});
  return arch;
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == kind) return kn.name;
  }
  return "unknown";
}

std::string_view to_string(CountingConvention convention) {
  return convention == CountingConvention::kFlopsPerMac2 ? "mac2" : "madds";
}

std::string describe(CountingConvention convention) {
  const std::string mac = convention == CountingConvention::kFlopsPerMac2
                              ? "one multiply-accumulate = 2 FLOPs"
                              : "one multiply-accumulate = 1 FLOP (multiply-adds)";
  return mac + "; batchnorm = 2/element, activation = 1/element, pooling = 1/input element";
}

LayerCost layer_flops(const LayerSpec& layer, const Geometry& in, CountingConvention convention) {
  if (in.channels == 0 || in.height == 0 || in.width == 0) shape_error(layer, in, "empty input");
  const bool channel_checked = layer.kind != LayerKind::kLinear;
  if (channel_checked && in.channels != layer.in_channels) {
    shape_error(layer, in, "expects " + std::to_string(layer.in_channels) + " input channels");
  }

  LayerCost cost;
  switch (layer.kind) {
    case LayerKind::kConv2d:
    case LayerKind::kDepthwiseConv2d: {
      const auto h = spatial_out(in.height, layer.kernel_h, layer.stride_h, layer.padding);
      const auto w = spatial_out(in.width, layer.kernel_w, layer.stride_w, layer.padding);
      if (h == 0 || w == 0) shape_error(layer, in, "kernel larger than input");
      cost.output = {layer.out_channels, h, w};
      const std::uint64_t kernel = std::uint64_t{layer.kernel_h} * layer.kernel_w;
      const std::uint64_t fan_in = layer.kind == LayerKind::kConv2d ? kernel * layer.in_channels : kernel;
      cost.flops = mac_flops(fan_in * cost.output.elements(), convention);
      break;
    }
    case LayerKind::kLinear: {
      if (in.elements() != layer.in_channels) {
        shape_error(layer, in, "flattened size differs from " + std::to_string(layer.in_channels));
      }
      cost.output = {layer.out_channels, 1, 1};
      cost.flops = mac_flops(std::uint64_t{layer.in_channels} * layer.out_channels, convention);
      break;
    }
    case LayerKind::kBatchNorm:
      cost.output = in;
      cost.flops = 2 * in.elements();
      break;
    case LayerKind::kActivation:
      cost.output = in;
      cost.flops = in.elements();
      break;
    case LayerKind::kPool2d: {
      const auto h = spatial_out(in.height, layer.kernel_h, layer.stride_h, Padding::kValid);
      const auto w = spatial_out(in.width, layer.kernel_w, layer.stride_w, Padding::kValid);
      if (h == 0 || w == 0) shape_error(layer, in, "pool window larger than input");
      cost.output = {in.channels, h, w};
      cost.flops = in.elements();
      break;
    }
    case LayerKind::kGlobalPool:
      cost.output = {in.channels, 1, 1};
      cost.flops = in.elements();
      break;
  }
  return cost;
}

FlopsReport model_flops(const ArchSpec& arch, std::uint64_t frames, CountingConvention convention) {
  if (frames == 0) throw Error(ErrorKind::kShape, "model_flops: zero input frames");
  validate(arch);
  FlopsReport report;
  report.input = arch.input_geometry(frames);
  report.convention = convention;
  Geometry g = report.input;
  for (const auto& layer : arch.layers) {
    const LayerCost cost = layer_flops(layer, g, convention);
    report.layers.push_back({layer, g, cost.output, cost.flops});
    report.total += cost.flops;
    g = cost.output;
  }
  return report;
}

std::vector<CompareRow> compare_report(const ArchSpec& arch, std::uint64_t frames,
                                       const std::vector<CompressionSpec>& specs,
                                       CountingConvention convention) {
  std::vector<CompareRow> rows;
  const std::uint64_t baseline = model_flops(arch, frames, convention).total;
  rows.push_back({std::nullopt, frames, baseline, 1.0});
  for (const auto& spec : specs) {
    const std::uint64_t t = spec.factor.output_frames(frames);
    if (t == 0) {
      throw Error(ErrorKind::kInputTooShort, spec.to_string() + " of " + std::to_string(frames) +
                                                 " frames gives floor(kT) = 0 frames");
    }
    const std::uint64_t f = model_flops(arch, t, convention).total;
    rows.push_back({spec, t, f, static_cast<double>(f) / static_cast<double>(baseline)});
  }
  return rows;
}

void validate(const ArchSpec& arch) {
  if (arch.input_channels == 0 || arch.input_height == 0) {
    throw Error(ErrorKind::kConfig, "arch '" + arch.name + "': input geometry must be positive");
  }
  std::uint64_t channels = arch.input_channels;
  bool flat = false;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const auto& l = arch.layers[i];
    const std::string where = "arch '" + arch.name + "' layer " + std::to_string(i) + " (" +
                              std::string(to_string(l.kind)) + ")";
    if (l.kernel_h == 0 || l.kernel_w == 0 || l.in_channels == 0 || l.out_channels == 0 ||
        l.stride_h == 0 || l.stride_w == 0) {
      throw Error(ErrorKind::kConfig, where + ": dimensions must be positive");
    }
    if (l.kind == LayerKind::kDepthwiseConv2d && l.in_channels != l.out_channels) {
      throw Error(ErrorKind::kConfig, where + ": depthwise requires in_channels == out_channels");
    }
    const bool same_width = l.kind == LayerKind::kBatchNorm || l.kind == LayerKind::kActivation ||
                            l.kind == LayerKind::kPool2d || l.kind == LayerKind::kGlobalPool;
    if (same_width && l.in_channels != l.out_channels) {
      throw Error(ErrorKind::kConfig, where + ": in_channels must equal out_channels");
    }
    // A linear layer after spatial layers flattens, so only its output is tracked.
    if (l.kind != LayerKind::kLinear && l.in_channels != channels) {
      throw Error(ErrorKind::kConfig, where + ": expects " + std::to_string(l.in_channels) +
                                          " channels but previous layer yields " + std::to_string(channels));
    }
    if (l.kind == LayerKind::kLinear && flat && l.in_channels != channels) {
      throw Error(ErrorKind::kConfig, where + ": expects " + std::to_string(l.in_channels) +
                                          " features but previous linear layer yields " + std::to_string(channels));
    }
    if (l.kind != LayerKind::kLinear && flat && l.kind != LayerKind::kActivation &&
        l.kind != LayerKind::kBatchNorm) {
      throw Error(ErrorKind::kConfig, where + ": spatial layer after a linear layer");
    }
    flat = flat || l.kind == LayerKind::kLinear;
    channels = l.out_channels;
  }
}

ArchSpec parse_arch(std::string_view text) {
  ArchSpec arch;
  arch.name = "unnamed";
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    const auto fail = [&](const std::string& why) {
      throw Error(ErrorKind::kConfig, "arch line " + std::to_string(line_no) + ": " + why);
    };
    if (tok[0] == "name") {
      if (tok.size() < 2) fail("name needs a value");
      arch.name = line.substr(line.find("name") + 4);
      arch.name.erase(0, arch.name.find_first_not_of(" \t"));
      arch.name.erase(arch.name.find_last_not_of(" \t\r") + 1);
      continue;
    }
    if (tok[0] == "input") {
      if (tok.size() != 3) fail("input needs <channels> <mel bins>");
      arch.input_channels = parse_u32(tok[1], line_no);
      arch.input_height = parse_u32(tok[2], line_no);
      continue;
    }
    const auto kn = std::find_if(kKindNames.begin(), kKindNames.end(),
                                 [&](const KindName& k) { return k.name == tok[0]; });
    if (kn == kKindNames.end()) fail("unknown layer kind '" + tok[0] + "'");
    if (tok.size() != 7 && tok.size() != 8) fail("expected 'kind k_h k_w c_in c_out stride_h stride_w [same|valid]'");
    LayerSpec l;
    l.kind = kn->kind;
    l.kernel_h = parse_u32(tok[1], line_no);
    l.kernel_w = parse_u32(tok[2], line_no);
    l.in_channels = parse_u32(tok[3], line_no);
    l.out_channels = parse_u32(tok[4], line_no);
    l.stride_h = parse_u32(tok[5], line_no);
    l.stride_w = parse_u32(tok[6], line_no);
    l.padding = l.kind == LayerKind::kPool2d ? Padding::kValid : Padding::kSame;
    if (tok.size() == 8) {
      if (tok[7] == "same") {
        l.padding = Padding::kSame;
      } else if (tok[7] == "valid") {
        l.padding = Padding::kValid;
      } else {
        fail("padding must be 'same' or 'valid'");
      }
    }
    arch.layers.push_back(l);
  }
  validate(arch);
  return arch;
}

ArchSpec load_arch(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_arch(buf.str());
}

std::string format_arch(const ArchSpec& arch) {
  std::ostringstream out;
  out << "name " << arch.name << '\n';
  out << "input " << arch.input_channels << ' ' << arch.input_height << '\n';
  for (const auto& l : arch.layers) {
    out << to_string(l.kind) << ' ' << l.kernel_h << ' ' << l.kernel_w << ' ' << l.in_channels << ' '
        << l.out_channels << ' ' << l.stride_h << ' ' << l.stride_w << ' '
        << (l.padding == Padding::kSame ? "same" : "valid") << '\n';
  }
  return out.str();
}

ArchSpec cnn10_like() { return panns_like("CNN10-like", {64, 128, 256, 512}, true); }

ArchSpec cnn14_like() { return panns_like("CNN14-like", {64, 128, 256, 512, 1024, 2048}, false); }

}  // namespace simpf::flops
