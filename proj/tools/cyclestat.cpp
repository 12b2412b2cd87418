// cyclestat: period detection, cross-cycle pose statistics and user/trainer
// fit scoring for cyclic skeleton sequences.

#include "cyclestat/error.hpp"
#include "cyclestat/report.hpp"
#include "cyclestat/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace cyclestat;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitStructure = 3;
constexpr int kExitNumeric = 4;

PoseSequence load_input(const std::string& source) {
  const auto model = SkeletonModel::body25();
  if (source == "-") return load_sequence(std::cin, model);
  if (!fs::exists(source)) throw Error(ErrorCode::NoFrames, "input not found: " + source);
  return load_sequence(fs::path(source), model);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + path);
  out << text;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
}

void add_analysis_flags(CLI::App& cmd, AnalysisConfig& config) {
  static const std::map<std::string, MeanMethod> methods{{"medoid", MeanMethod::Medoid},
                                                         {"barycenter", MeanMethod::Barycenter}};
  cmd.add_option("--template-len", config.template_length,
                 "Template window length T in frames (default: frames / 8)")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--min-exclusion", config.min_exclusion,
                 "Local-minimum exclusion radius (default: T / 2)")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--cluster-gap-mult", config.cluster_gap_mult,
                 "Dendrogram cut as a multiple of the median gap between minima values")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--mean", config.mean, "Mean pose estimator: medoid or barycenter")
      ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case));
  cmd.add_option("--epsilon", config.epsilon, "Precision index regularizer")
      ->check(CLI::PositiveNumber);
}

int run_synth(const SynthConfig& cfg, const std::string& out_path) {
  const PoseSequence seq = generate_cyclic_sequence(cfg);
  if (!out_path.empty() && fs::path(out_path).extension() != ".jsonl") {
    fs::create_directories(out_path);
    for (const auto& pose : seq.poses) {
      char name[64];
      std::snprintf(name, sizeof name, "synth_%012d_keypoints.json", pose.frame_index);
      write_text((fs::path(out_path) / name).string(), to_openpose_json(pose));
    }
    return 0;
  }
  std::string lines;
  for (const auto& pose : seq.poses) lines += to_openpose_json(pose) + "\n";
  emit(out_path, lines);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cyclic exercise analysis on skeleton keypoint sequences"};
  app.require_subcommand(1);

  AnalysisConfig config;
  std::string out_path, csv_path, plot_path, input, trainer_path, user_path;

  auto* analyze = app.add_subcommand("analyze", "Period, cycles and per-pose precision of one sequence");
  analyze->add_option("input", input, "Directory of OpenPose frames, JSON-lines file, or - for stdin")
      ->required();
  add_analysis_flags(*analyze, config);
  analyze->add_option("--out", out_path, "Write the JSON report here instead of stdout");

  auto* compare = app.add_subcommand("compare", "Score a user sequence against a trainer sequence");
  compare->add_option("trainer", trainer_path, "Trainer sequence")->required();
  compare->add_option("user", user_path, "User sequence")->required();
  add_analysis_flags(*compare, config);
  compare->add_option("--out", out_path, "Write the JSON report here instead of stdout");
  compare->add_option("--csv", csv_path, "Also write per-pose records as CSV");
  compare->add_option("--plot", plot_path, "Also write an SVG plot of precision and fit");

  SynthConfig synth_cfg;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic cyclic sequence in OpenPose format");
  synth->add_option("--period", synth_cfg.period, "Frames per cycle");
  synth->add_option("--cycles", synth_cfg.num_cycles, "Number of cycles");
  synth->add_option("--noise", synth_cfg.noise_sigma, "Coordinate noise, fraction of torso length");
  synth->add_option("--phase-jitter", synth_cfg.phase_jitter, "Max per-cycle phase shift in frames");
  synth->add_option("--amplitude", synth_cfg.amplitude, "Motion amplitude (0 = static pose)");
  synth->add_option("--seed", synth_cfg.seed, "Random seed");
  synth->add_option("--out", out_path,
                    "Output directory of per-frame files, or a .jsonl file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*synth) return run_synth(synth_cfg, out_path);

    if (*analyze) {
      const auto analysis = analyze_sequence(load_input(input), config);
      emit(out_path, analyze_report_json(analysis, config).dump(2) + "\n");
      return 0;
    }

    const auto trainer = analyze_sequence(load_input(trainer_path), config);
    const auto user = analyze_sequence(load_input(user_path), config);
    const auto comparison = compare_analyses(trainer, user);
    emit(out_path, compare_report_json(trainer, user, comparison, config).dump(2) + "\n");
    if (!csv_path.empty()) write_text(csv_path, comparison_csv(comparison));
    if (!plot_path.empty()) write_text(plot_path, comparison_svg(comparison));
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.category()) {
      case ErrorCategory::Structure: return kExitStructure;
      case ErrorCategory::Numeric: return kExitNumeric;
      case ErrorCategory::Input: return kExitInput;
    }
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
