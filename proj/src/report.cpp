#include "cyclestat/report.hpp"

#include "cyclestat/error.hpp"
#include "cyclestat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace cyclestat {

using ojson = nlohmann::ordered_json;

std::vector<GramMatrix> SequenceAnalysis::mean_poses() const {
  std::vector<GramMatrix> means;
  means.reserve(stats.size());
  for (const auto& s : stats) means.push_back(s.mean_pose);
  return means;
}

int SequenceAnalysis::barycenter_fallbacks() const {
  return static_cast<int>(std::count_if(stats.begin(), stats.end(),
                                        [](const PoseSetStats& s) { return s.barycenter_fallback; }));
}

SequenceAnalysis analyze_sequence(const PoseSequence& raw, const AnalysisConfig& config) {
  if (!(config.epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be > 0");
  if (!(config.cluster_gap_mult > 0.0))
    throw Error(ErrorCode::InvalidConfig, "cluster gap multiplier must be > 0");
  if (config.template_length < 0 || config.min_exclusion < 0)
    throw Error(ErrorCode::InvalidConfig, "template length and exclusion must be >= 0");

  const PoseSequence seq = raw.normalized ? raw : normalize_sequence(raw);
  std::vector<GramMatrix> grams(seq.size());
  parallel_for(seq.size(), [&](std::size_t k) { grams[k] = gram_of(seq.poses[k]); });

  SequenceAnalysis analysis;
  analysis.frames = static_cast<int>(seq.size());
  analysis.detection =
      detect_cycles(grams, {config.template_length, config.min_exclusion, config.cluster_gap_mult});
  analysis.template_length = analysis.detection.profile.template_length;

  std::vector<std::vector<GramMatrix>> cycles;
  for (const auto& [start, end] : analysis.detection.segmentation.cycle_ranges)
    cycles.emplace_back(grams.begin() + start, grams.begin() + end + 1);
  analysis.pose_sets = build_pose_sets(cycles);
  analysis.stats = all_pose_set_stats(analysis.pose_sets, config.mean, config.epsilon);
  return analysis;
}

ComparisonReport compare_analyses(const SequenceAnalysis& trainer, const SequenceAnalysis& user) {
  const auto trainer_means = trainer.mean_poses();
  const auto user_means = user.mean_poses();
  const WarpingPath path = align_mean_sequences(user_means, trainer_means);
  const FitReport fit = fit_indices(trainer.stats, user.stats, path);
  const auto matched = correspondences(path);

  ComparisonReport report;
  report.best_index = fit.best_index;
  report.worst_index = fit.worst_index;
  for (std::size_t i = 0; i < fit.per_pose.size(); ++i) {
    PoseRecord r;
    r.anchor_index = fit.per_pose[i].anchor_index;
    r.trainer_sigma = trainer.stats[i].avg_deviation;
    r.trainer_precision = fit.per_pose[i].trainer_precision;
    r.user_precision = fit.per_pose[i].user_precision;
    r.fit = fit.per_pose[i].fit;
    double sigma = 0.0, distance = 0.0;
    for (int j : matched[i]) {
      sigma += user.stats[j].avg_deviation;
      distance += geodesic_distance(trainer_means[i], user_means[j]);
    }
    r.user_sigma = sigma / static_cast<double>(matched[i].size());
    r.mean_pose_distance = distance / static_cast<double>(matched[i].size());
    report.per_pose.push_back(r);
  }
  return report;
}

double round_sig9(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

namespace {

std::string_view method_name(MeanMethod m) { return m == MeanMethod::Medoid ? "medoid" : "barycenter"; }

ojson sequence_json(const SequenceAnalysis& a) {
  const auto& seg = a.detection.segmentation;
  ojson out;
  out["frames"] = a.frames;
  out["template_length"] = a.template_length;
  out["exclusion"] = a.detection.exclusion;
  out["period"] = round_sig9(seg.period);
  out["num_cycles"] = seg.num_cycles();
  out["minima_used"] = seg.minima_used;
  ojson ranges = ojson::array();
  for (const auto& [s, e] : seg.cycle_ranges) ranges.push_back({s, e});
  out["cycle_ranges"] = std::move(ranges);
  out["barycenter_fallbacks"] = a.barycenter_fallbacks();
  return out;
}

std::string fmt(double x, const char* format = "%.9g") {
  char buf[40];
  std::snprintf(buf, sizeof buf, format, x);
  return buf;
}

}  // namespace

ojson config_json(const AnalysisConfig& config) {
  ojson out;
  out["template_len"] = config.template_length;
  out["min_exclusion"] = config.min_exclusion;
  out["cluster_gap_mult"] = round_sig9(config.cluster_gap_mult);
  out["mean"] = method_name(config.mean);
  out["epsilon"] = round_sig9(config.epsilon);
  return out;
}

ojson analyze_report_json(const SequenceAnalysis& analysis, const AnalysisConfig& config) {
  ojson out;
  out["schema_version"] = kReportSchemaVersion;
  out["command"] = "analyze";
  out["config"] = config_json(config);
  const ojson summary = sequence_json(analysis);
  for (const auto& [key, value] : summary.items()) out[key] = value;
  ojson per_pose = ojson::array();
  for (std::size_t k = 0; k < analysis.stats.size(); ++k) {
    ojson rec;
    rec["anchor_index"] = analysis.pose_sets[k].anchor_index;
    rec["members"] = analysis.pose_sets[k].members.size();
    rec["sigma"] = round_sig9(analysis.stats[k].avg_deviation);
    rec["precision"] = round_sig9(analysis.stats[k].precision);
    per_pose.push_back(std::move(rec));
  }
  out["per_pose"] = std::move(per_pose);
  return out;
}

ojson compare_report_json(const SequenceAnalysis& trainer, const SequenceAnalysis& user,
                          const ComparisonReport& comparison, const AnalysisConfig& config) {
  ojson out;
  out["schema_version"] = kReportSchemaVersion;
  out["command"] = "compare";
  out["config"] = config_json(config);
  out["period"] = round_sig9(trainer.detection.segmentation.period);
  out["num_cycles"] = trainer.detection.segmentation.num_cycles();
  out["trainer"] = sequence_json(trainer);
  out["user"] = sequence_json(user);
  ojson per_pose = ojson::array();
  for (const auto& r : comparison.per_pose) {
    ojson rec;
    rec["anchor_index"] = r.anchor_index;
    rec["trainer_sigma"] = round_sig9(r.trainer_sigma);
    rec["user_sigma"] = round_sig9(r.user_sigma);
    rec["trainer_precision"] = round_sig9(r.trainer_precision);
    rec["user_precision"] = round_sig9(r.user_precision);
    rec["mean_pose_distance"] = round_sig9(r.mean_pose_distance);
    rec["fit"] = round_sig9(r.fit);
    per_pose.push_back(std::move(rec));
  }
  out["per_pose"] = std::move(per_pose);
  out["best_index"] = comparison.best_index;
  out["worst_index"] = comparison.worst_index;
  if (!comparison.per_pose.empty()) {
    out["best_fit"] = round_sig9(comparison.per_pose[comparison.best_index].fit);
    out["worst_fit"] = round_sig9(comparison.per_pose[comparison.worst_index].fit);
  }
  return out;
}

std::string comparison_csv(const ComparisonReport& comparison) {
  std::ostringstream out;
  out << "anchor_index,trainer_sigma,user_sigma,trainer_precision,user_precision,"
         "mean_pose_distance,fit\n";
  for (const auto& r : comparison.per_pose) {
    out << r.anchor_index << ',' << fmt(r.trainer_sigma) << ',' << fmt(r.user_sigma) << ','
        << fmt(r.trainer_precision) << ',' << fmt(r.user_precision) << ','
        << fmt(r.mean_pose_distance) << ',' << fmt(r.fit) << '\n';
  }
  return out.str();
}

namespace {

struct Panel {
  double top, bottom, lo, hi;
  bool log_scale;

  double y(double v) const {
    const double a = log_scale ? std::log10(v) : v;
    const double b = log_scale ? std::log10(lo) : lo;
    const double c = log_scale ? std::log10(hi) : hi;
    const double t = c > b ? (a - b) / (c - b) : 0.5;
    return bottom - t * (bottom - top);
  }
};

constexpr double kLeft = 70.0, kRight = 770.0;

double x_at(std::size_t i, std::size_t n) {
  return n > 1 ? kLeft + (kRight - kLeft) * static_cast<double>(i) / static_cast<double>(n - 1)
               : 0.5 * (kLeft + kRight);
}

void polyline(std::ostringstream& out, const std::vector<double>& v, const Panel& p,
              const char* color, const char* label) {
  out << "  <polyline class=\"series\" data-label=\"" << label << "\" fill=\"none\" stroke=\""
      << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << fmt(x_at(i, v.size()), "%.2f") << ',' << fmt(p.y(v[i]), "%.2f");
  }
  out << "\"/>\n";
}

void axes(std::ostringstream& out, const Panel& p, const char* title) {
  out << "  <rect x=\"" << kLeft << "\" y=\"" << p.top << "\" width=\"" << kRight - kLeft
      << "\" height=\"" << p.bottom - p.top << "\" fill=\"none\" stroke=\"#999\"/>\n";
  out << "  <text x=\"" << kLeft << "\" y=\"" << p.top - 8 << "\" font-size=\"13\">" << title
      << "</text>\n";
  out << "  <text x=\"" << kLeft - 6 << "\" y=\"" << p.top + 4
      << "\" font-size=\"10\" text-anchor=\"end\">" << fmt(p.hi, "%.3g") << "</text>\n";
  out << "  <text x=\"" << kLeft - 6 << "\" y=\"" << p.bottom
      << "\" font-size=\"10\" text-anchor=\"end\">" << fmt(p.lo, "%.3g") << "</text>\n";
}

}  // namespace

std::string comparison_svg(const ComparisonReport& comparison) {
  std::vector<double> trainer, user, fit;
  for (const auto& r : comparison.per_pose) {
    trainer.push_back(r.trainer_precision);
    user.push_back(r.user_precision);
    fit.push_back(r.fit);
  }
  const std::size_t n = fit.size();

  Panel precision{50.0, 250.0, 1.0, 10.0, true};
  Panel fit_panel{310.0, 490.0, 0.0, 2.0, false};
  if (n > 0) {
    const auto [tmin, tmax] = std::minmax_element(trainer.begin(), trainer.end());
    const auto [umin, umax] = std::minmax_element(user.begin(), user.end());
    precision.lo = std::pow(10.0, std::floor(std::log10(std::min(*tmin, *umin))));
    precision.hi = std::pow(10.0, std::ceil(std::log10(std::max(*tmax, *umax))));
    if (precision.hi <= precision.lo) precision.hi = precision.lo * 10.0;
    fit_panel.hi = std::max(2.0, std::ceil(*std::max_element(fit.begin(), fit.end()) * 1.1));
  }

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"540\" "
         "viewBox=\"0 0 800 540\">\n";
  out << "  <rect width=\"800\" height=\"540\" fill=\"white\"/>\n";
  axes(out, precision, "Index of precision (log scale)");
  axes(out, fit_panel, "Index of fit (trainer / user precision)");
  out << "  <line x1=\"" << kLeft << "\" x2=\"" << kRight << "\" y1=\"" << fmt(fit_panel.y(1.0), "%.2f")
      << "\" y2=\"" << fmt(fit_panel.y(1.0), "%.2f")
      << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
  polyline(out, trainer, precision, "#1f77b4", "trainer precision");
  polyline(out, user, precision, "#ff7f0e", "user precision");
  polyline(out, fit, fit_panel, "#222222", "fit");
  if (n > 0) {
    const auto mark = [&](int idx, const char* color, const char* label) {
      out << "  <circle class=\"marker\" data-label=\"" << label << "\" cx=\""
          << fmt(x_at(static_cast<std::size_t>(idx), n), "%.2f") << "\" cy=\""
          << fmt(fit_panel.y(fit[static_cast<std::size_t>(idx)]), "%.2f") << "\" r=\"5\" fill=\""
          << color << "\"/>\n";
      out << "  <text x=\"" << fmt(x_at(static_cast<std::size_t>(idx), n), "%.2f") << "\" y=\""
          << fmt(fit_panel.y(fit[static_cast<std::size_t>(idx)]) - 9, "%.2f")
          << "\" font-size=\"10\" text-anchor=\"middle\">pose:" << idx << " - fit:"
          << fmt(fit[static_cast<std::size_t>(idx)], "%.2g") << "</text>\n";
    };
    mark(comparison.best_index, "#2ca02c", "best");
    mark(comparison.worst_index, "#d62728", "worst");
  }
  const char* legend[][2] = {{"#1f77b4", "trainer precision"},
                             {"#ff7f0e", "user precision"},
                             {"#222222", "fit"}};
  for (int k = 0; k < 3; ++k) {
    const double x = kLeft + 10 + 150.0 * k;
    out << "  <line x1=\"" << x << "\" x2=\"" << x + 20 << "\" y1=\"520\" y2=\"520\" stroke=\""
        << legend[k][0] << "\" stroke-width=\"2\"/>\n";
    out << "  <text class=\"legend\" x=\"" << x + 26 << "\" y=\"524\" font-size=\"12\">"
        << legend[k][1] << "</text>\n";
  }
  out << "  <text x=\"" << (kLeft + kRight) / 2 << "\" y=\"506\" font-size=\"11\" "
      << "text-anchor=\"middle\">trainer anchor (normalized time step)</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace cyclestat
