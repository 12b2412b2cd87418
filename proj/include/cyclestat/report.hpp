#pragma once

// End-to-end pipeline and report emission (JSON, CSV, SVG) behind the CLI.

#include "cyclestat/cycles.hpp"
#include "cyclestat/skeleton.hpp"
#include "cyclestat/statistics.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace cyclestat {

inline constexpr int kReportSchemaVersion = 1;

struct AnalysisConfig {
  int template_length = 0;  // 0 = auto
  int min_exclusion = 0;    // 0 = template_length / 2
  double cluster_gap_mult = 2.0;
  MeanMethod mean = MeanMethod::Medoid;
  double epsilon = kDefaultPrecisionEpsilon;
};

struct SequenceAnalysis {
  int frames = 0;
  int template_length = 0;
  PeriodDetection detection;
  std::vector<PoseSet> pose_sets;
  std::vector<PoseSetStats> stats;

  std::vector<GramMatrix> mean_poses() const;
  int barycenter_fallbacks() const;
};

/// Normalize, build Grams, detect cycles, build pose-sets and their stats.
SequenceAnalysis analyze_sequence(const PoseSequence& raw, const AnalysisConfig& config);

struct PoseRecord {
  int anchor_index = 0;
  double trainer_sigma = 0.0;
  double user_sigma = 0.0;
  double trainer_precision = 0.0;
  double user_precision = 0.0;
  double mean_pose_distance = 0.0;
  double fit = 0.0;
};

struct ComparisonReport {
  std::vector<PoseRecord> per_pose;
  int best_index = 0;
  int worst_index = 0;
};

ComparisonReport compare_analyses(const SequenceAnalysis& trainer, const SequenceAnalysis& user);

/// Rounds to 9 significant digits so the serialized text is stable.
double round_sig9(double x);

nlohmann::ordered_json config_json(const AnalysisConfig& config);
nlohmann::ordered_json analyze_report_json(const SequenceAnalysis& analysis,
                                           const AnalysisConfig& config);
nlohmann::ordered_json compare_report_json(const SequenceAnalysis& trainer,
                                           const SequenceAnalysis& user,
                                           const ComparisonReport& comparison,
                                           const AnalysisConfig& config);

std::string comparison_csv(const ComparisonReport& comparison);

/// Two stacked panels: trainer/user precision (log scale) and fit, with the
/// best and worst anchors marked.
std::string comparison_svg(const ComparisonReport& comparison);

}  // namespace cyclestat
