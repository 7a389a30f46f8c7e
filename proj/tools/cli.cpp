#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "simpf/audio_io.hpp"
#include "simpf/container.hpp"
#include "simpf/error.hpp"
#include "simpf/experiment.hpp"
#include "simpf/features.hpp"
#include "simpf/flops.hpp"
#include "simpf/pooling.hpp"
#include "simpf/render.hpp"

namespace simpf::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const Matrix<double>& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(json(std::vector<double>(row.begin(), row.end())));
  }
  return rows;
}

std::string shape(std::size_t rows, std::size_t cols) {
  return std::to_string(rows) + " x " + std::to_string(cols);
}

const CLI::Validator kSpecValidator(
    [](std::string& text) {
      try {
        CompressionSpec::parse(text);
      } catch (const Error& e) {
        return std::string(e.what());
      }
      return std::string();
    },
    "METHOD:DEN", "CompressionSpec");

// Output files must land in an existing directory.
const CLI::Validator kWritablePath(
    [](std::string& text) {
      const fs::path parent = fs::path(text).parent_path();
      if (!parent.empty() && !fs::is_directory(parent)) {
        return "directory does not exist: " + parent.string();
      }
      return std::string();
    },
    "PATH", "WritablePath");

struct SpectrogramOptions {
  SpectrogramConfig cfg;
  std::string mel_norm = "area";

  void attach(CLI::App& cmd) {
    cmd.add_option("--n-fft", cfg.n_fft, "FFT size")->capture_default_str();
    cmd.add_option("--hop", cfg.hop, "hop size in samples")->capture_default_str();
    cmd.add_option("--n-mels", cfg.n_mels, "number of mel bands")->capture_default_str();
    cmd.add_option("--f-min", cfg.f_min, "lowest filter edge in Hz")->capture_default_str();
    cmd.add_option("--f-max", cfg.f_max, "highest filter edge in Hz, 0 = Nyquist")->capture_default_str();
    cmd.add_option("--mel-norm", mel_norm, "filter normalization")
        ->check(CLI::IsMember({"area", "none"}))
        ->capture_default_str();
  }
  SpectrogramConfig resolve() const {
    SpectrogramConfig out = cfg;
    out.mel_norm = mel_norm == "none" ? MelNorm::kNone : MelNorm::kArea;
    return out;
  }
};

json config_json(const SpectrogramConfig& cfg, std::uint32_t sample_rate) {
  return {{"n_fft", cfg.n_fft},
          {"hop", cfg.hop},
          {"n_mels", cfg.n_mels},
          {"f_min", cfg.f_min},
          {"f_max", cfg.resolved_f_max(sample_rate)},
          {"mel_norm", cfg.mel_norm == MelNorm::kArea ? "area" : "none"}};
}

// ---------------------------------------------------------------- melspec

struct MelspecArgs {
  std::string input;
  std::string output;
  std::optional<double> seconds;
  SpectrogramOptions spectrogram;
  bool json = false;
};

int cmd_melspec(const MelspecArgs& a, std::ostream& out) {
  AudioClip clip = read_wav_file(a.input);
  if (a.seconds) clip = pad_or_trim(clip, *a.seconds);
  const MelSpectrogram mel = log_mel(clip, a.spectrogram.resolve());
  if (!a.output.empty()) write_container(a.output, mel);

  if (a.json) {
    json j{{"command", "melspec"},
           {"input", a.input},
           {"sample_rate", mel.sample_rate},
           {"samples", clip.samples.size()},
           {"n_mels", mel.n_mels()},
           {"n_frames", mel.n_frames()},
           {"config", config_json(mel.config, mel.sample_rate)},
           {"data", to_json(mel.data)}};
    j["output"] = a.output.empty() ? json(nullptr) : json(a.output);
    out << j.dump() << '\n';
  } else {
    out << shape(mel.n_mels(), mel.n_frames()) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- pool

struct PoolArgs {
  std::string input;
  std::string spec;
  std::string output;
  bool json = false;
};

int cmd_pool(const PoolArgs& a, std::ostream& out) {
  const CompressionSpec spec = CompressionSpec::parse(a.spec);
  const SpectrogramFile in = read_container(a.input);
  const CompressedSpectrogram c{compress(in.data, spec), spec, in.data.cols()};
  if (!a.output.empty()) write_container(a.output, c);

  const double ratio = static_cast<double>(c.n_frames()) / static_cast<double>(c.original_frames);
  if (a.json) {
    json j{{"command", "pool"},
           {"input", a.input},
           {"spec", spec.to_string()},
           {"input_shape", {in.data.rows(), in.data.cols()}},
           {"output_shape", {c.n_mels(), c.n_frames()}},
           {"ratio", ratio},
           {"data", to_json(c.data)}};
    j["output"] = a.output.empty() ? json(nullptr) : json(a.output);
    out << j.dump() << '\n';
  } else {
    out << shape(in.data.rows(), in.data.cols()) << " -> " << shape(c.n_mels(), c.n_frames())
        << " (" << spec.to_string() << ", frame ratio " << std::fixed << std::setprecision(4) << ratio
        << ")\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- render

struct RenderArgs {
  std::vector<std::string> inputs;
  std::string out_dir;
  std::string csv;
  bool json = false;
};

int cmd_render(const RenderArgs& a, std::ostream& out, std::ostream& err) {
  std::set<std::string> stems;
  for (const auto& in : a.inputs) {
    if (!stems.insert(fs::path(in).stem().string()).second) {
      err << "error: two inputs share the file stem '" << fs::path(in).stem().string() << "'\n";
      return kExitUsage;
    }
  }
  fs::create_directories(a.out_dir);
  const fs::path csv_path = a.csv.empty() ? fs::path(a.out_dir) / "render.csv" : fs::path(a.csv);

  std::ostringstream csv;
  csv << std::setprecision(std::numeric_limits<double>::max_digits10);
  csv << "file,band,frame,value,pixel\n";
  json images = json::array();
  for (const auto& in : a.inputs) {
    const SpectrogramFile file = read_container(in);
    const GrayImage img = render_spectrogram(file.data);
    const fs::path pgm = fs::path(a.out_dir) / (fs::path(in).stem().string() + ".pgm");
    write_pgm(pgm, img);

    const auto values = file.data.values();
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const std::string name = fs::path(in).filename().string();
    for (std::size_t f = 0; f < file.data.rows(); ++f) {
      for (std::size_t t = 0; t < file.data.cols(); ++t) {
        csv << name << ',' << f << ',' << t << ',' << file.data(f, t) << ','
            << static_cast<int>(img.at(t, img.height - 1 - f)) << '\n';
      }
    }
    images.push_back({{"input", in},
                      {"output", pgm.string()},
                      {"width", img.width},
                      {"height", img.height},
                      {"min", *lo},
                      {"max", *hi}});
    if (!a.json) out << pgm.string() << ": " << img.width << " x " << img.height << '\n';
  }
  const std::string text = csv.str();
  write_file_bytes(csv_path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));

  if (a.json) {
    out << json{{"command", "render"}, {"images", images}, {"csv", csv_path.string()}}.dump() << '\n';
  } else {
    out << csv_path.string() << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- flops

struct FlopsArgs {
  std::string arch = "cnn10";
  std::uint64_t frames = 1379;
  std::vector<std::string> specs;
  std::string convention = "mac2";
  bool json = false;
};

int cmd_flops(const FlopsArgs& a, std::ostream& out, std::ostream& err) {
  flops::ArchSpec arch;
  if (a.arch == "cnn10") {
    arch = flops::cnn10_like();
  } else if (a.arch == "cnn14") {
    arch = flops::cnn14_like();
  } else if (fs::is_regular_file(a.arch)) {
    arch = flops::load_arch(a.arch);
  } else {
    err << "error: --arch must be cnn10, cnn14 or an existing arch file: " << a.arch << '\n';
    return kExitUsage;
  }
  const auto convention = a.convention == "madds" ? flops::CountingConvention::kMultiplyAdds
                                                  : flops::CountingConvention::kFlopsPerMac2;
  std::vector<CompressionSpec> specs;
  for (const auto& s : a.specs) specs.push_back(CompressionSpec::parse(s));
  const auto rows = flops::compare_report(arch, a.frames, specs, convention);

  if (a.json) {
    json jr = json::array();
    for (const auto& r : rows) {
      jr.push_back({{"label", r.label()}, {"frames", r.frames}, {"flops", r.flops}, {"ratio", r.ratio}});
    }
    out << json{{"command", "flops"},
                {"arch", arch.name},
                {"input", {arch.input_channels, arch.input_height, a.frames}},
                {"convention", flops::to_string(convention)},
                {"convention_description", flops::describe(convention)},
                {"rows", jr}}
               .dump()
        << '\n';
    return kExitOk;
  }
  out << "arch " << arch.name << ", input " << arch.input_channels << " x " << arch.input_height << " x "
      << a.frames << '\n';
  out << "convention: " << flops::to_string(convention) << " (" << flops::describe(convention) << ")\n";
  out << std::left << std::setw(14) << "frontend" << std::right << std::setw(8) << "frames" << std::setw(16)
      << "flops" << std::setw(10) << "GFLOPs" << std::setw(9) << "ratio" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(14) << r.label() << std::right << std::setw(8) << r.frames
        << std::setw(16) << r.flops << std::fixed << std::setprecision(3) << std::setw(10)
        << static_cast<double>(r.flops) / 1e9 << std::setprecision(4) << std::setw(9) << r.ratio << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- demo

struct DemoArgs {
  std::uint64_t seed = 0;
  std::string spec;
  std::string history;
  std::size_t epochs = nn::TrainConfig{}.epochs;
  std::size_t train_per_class = nn::ExperimentConfig{}.train_per_class;
  std::size_t test_per_class = nn::ExperimentConfig{}.test_per_class;
  bool json = false;
};

int cmd_demo(const DemoArgs& a, std::ostream& out) {
  nn::ExperimentConfig cfg;
  cfg.seed = a.seed;
  if (!a.spec.empty()) cfg.frontend = CompressionSpec::parse(a.spec);
  cfg.train.epochs = a.epochs;
  cfg.train_per_class = a.train_per_class;
  cfg.test_per_class = a.test_per_class;
  const auto r = nn::run_synthetic_experiment(cfg);
  const auto& hist = r.training.history;

  std::ostringstream history_csv;
  nn::write_history_csv(history_csv, hist);
  if (!a.history.empty()) {
    std::ofstream f(a.history);
    f << history_csv.str();
    if (!f) throw Error(ErrorKind::kIo, "cannot write " + a.history);
  }

  const std::string frontend = cfg.frontend ? cfg.frontend->to_string() : "baseline";
  if (a.json) {
    json jh = json::array();
    for (const auto& e : hist) {
      jh.push_back({{"epoch", e.epoch},
                    {"loss", e.loss},
                    {"train_accuracy", e.train_accuracy},
                    {"test_accuracy", e.test_accuracy ? json(*e.test_accuracy) : json(nullptr)}});
    }
    out << json{{"command", "demo"},
                {"seed", a.seed},
                {"frontend", frontend},
                {"train_clips", a.train_per_class * cfg.data.n_classes},
                {"test_clips", a.test_per_class * cfg.data.n_classes},
                {"input_frames", r.input_frames},
                {"baseline_frames", r.baseline_frames},
                {"train_accuracy", hist.back().train_accuracy},
                {"test_accuracy", r.test_accuracy},
                {"model_flops", r.model_flops},
                {"baseline_flops", r.baseline_flops},
                {"flops_ratio", r.flops_ratio},
                {"convention", flops::to_string(flops::CountingConvention::kFlopsPerMac2)},
                {"history", jh}}
               .dump()
        << '\n';
    return kExitOk;
  }
  out << "seed " << a.seed << ", frontend " << frontend << ", classifier input "
      << shape(cfg.train.spectrogram.n_mels, r.input_frames) << '\n';
  out << std::fixed << std::setprecision(4);
  out << "accuracy: train " << hist.back().train_accuracy << ", test " << r.test_accuracy << '\n';
  out << "flops: " << r.model_flops << " / " << r.baseline_flops << " (ratio " << r.flops_ratio
      << ", " << flops::to_string(flops::CountingConvention::kFlopsPerMac2) << ")\n";
  if (a.history.empty()) {
    out << history_csv.str();
  } else {
    out << "history: " << a.history << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simple pooling front-ends for log-mel spectrograms", "simpf"};
  app.require_subcommand(1);

  MelspecArgs mel;
  auto* melspec = app.add_subcommand("melspec", "WAV file to log-mel spectrogram container");
  melspec->add_option("input", mel.input, "input WAV")->required()->check(CLI::ExistingFile);
  melspec->add_option("-o,--output", mel.output, "output container")->check(kWritablePath);
  melspec->add_option("--seconds", mel.seconds, "pad or trim the clip to this duration first")
      ->check(CLI::PositiveNumber);
  mel.spectrogram.attach(*melspec);
  melspec->add_flag("--json", mel.json, "machine-readable output");

  PoolArgs pl;
  auto* pool = app.add_subcommand("pool", "compress a spectrogram container along time");
  pool->add_option("input", pl.input, "input container")->required()->check(CLI::ExistingFile);
  pool->add_option("spec", pl.spec, "method:denominator, e.g. spectral:2")->required()->check(kSpecValidator);
  pool->add_option("-o,--output", pl.output, "output container")->check(kWritablePath);
  pool->add_flag("--json", pl.json, "machine-readable output");

  RenderArgs rd;
  auto* render = app.add_subcommand("render", "PGM images and a combined CSV of spectrogram containers");
  render->add_option("inputs", rd.inputs, "input containers")->required()->check(CLI::ExistingFile);
  render->add_option("-o,--out-dir", rd.out_dir, "output directory")->required();
  render->add_option("--csv", rd.csv, "combined CSV path (default <out-dir>/render.csv)")->check(kWritablePath);
  render->add_flag("--json", rd.json, "machine-readable output");

  FlopsArgs fl;
  auto* flops_cmd = app.add_subcommand("flops", "per-clip FLOPs with and without front-ends");
  flops_cmd->add_option("--arch", fl.arch, "cnn10, cnn14 or an arch file")->capture_default_str();
  flops_cmd->add_option("--frames", fl.frames, "baseline frame count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  flops_cmd->add_option("specs", fl.specs, "front-ends to compare")->check(kSpecValidator);
  flops_cmd->add_option("--convention", fl.convention, "mac2: MAC = 2 FLOPs; madds: MAC = 1")
      ->check(CLI::IsMember({"mac2", "madds"}))
      ->capture_default_str();
  flops_cmd->add_flag("--json", fl.json, "machine-readable output");

  DemoArgs dm;
  auto* demo = app.add_subcommand("demo", "train the tiny CNN on synthetic audio");
  demo->add_option("--seed", dm.seed, "run seed")->envname("SIMPF_SEED")->capture_default_str();
  demo->add_option("--spec", dm.spec, "front-end, e.g. avg:2")->check(kSpecValidator);
  demo->add_option("--history", dm.history, "write the per-epoch history CSV here")->check(kWritablePath);
  demo->add_option("--epochs", dm.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  demo->add_option("--train-per-class", dm.train_per_class)->check(CLI::PositiveNumber)->capture_default_str();
  demo->add_option("--test-per-class", dm.test_per_class)->check(CLI::PositiveNumber)->capture_default_str();
  demo->add_flag("--json", dm.json, "machine-readable output");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*melspec) return cmd_melspec(mel, out);
    if (*pool) return cmd_pool(pl, out);
    if (*render) return cmd_render(rd, out, err);
    if (*flops_cmd) return cmd_flops(fl, out, err);
    return cmd_demo(dm, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kIo ? kExitUsage : kExitDomain;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace simpf::cli
