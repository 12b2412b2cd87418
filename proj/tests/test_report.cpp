#include "cyclestat/error.hpp"
#include "cyclestat/report.hpp"
#include "cyclestat/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <regex>

using namespace cyclestat;
using ojson = nlohmann::ordered_json;

namespace {

SequenceAnalysis analyze(const SynthConfig& cfg, const AnalysisConfig& config = {}) {
  return analyze_sequence(generate_cyclic_sequence(cfg), config);
}

std::vector<std::string> keys(const ojson& j) {
  std::vector<std::string> out;
  for (const auto& [k, v] : j.items()) out.push_back(k);
  return out;
}

void check_finite(const ojson& j) {
  if (j.is_number_float()) CHECK(std::isfinite(j.get<double>()));
  if (j.is_structured())
    for (const auto& v : j) check_finite(v);
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("nine significant digits") {
  CHECK(round_sig9(1.0) == 1.0);
  CHECK(round_sig9(0.0) == 0.0);
  CHECK(round_sig9(3.14159265358979) == 3.14159265);
  CHECK(round_sig9(-123456.7891234) == -123456.789);
  CHECK(round_sig9(1.23456789012e-7) == 1.23456789e-7);
  CHECK(round_sig9(round_sig9(2.0 / 3.0)) == round_sig9(2.0 / 3.0));
  CHECK(std::isinf(round_sig9(HUGE_VAL)));
}

TEST_CASE("analysis of a clean synthetic sequence") {
  const auto a = analyze({.period = 40, .num_cycles = 3});
  CHECK(a.frames == 120);
  CHECK(a.template_length == 15);
  CHECK(a.detection.segmentation.period == 40.0);
  CHECK(a.detection.segmentation.num_cycles() == 3);
  REQUIRE(a.pose_sets.size() == 40);
  REQUIRE(a.stats.size() == 40);
  for (const auto& s : a.stats) CHECK(s.avg_deviation < 1e-6);
  CHECK(a.mean_poses().size() == 40);
  CHECK(a.barycenter_fallbacks() == 0);
}

TEST_CASE("bad analysis config") {
  const auto seq = generate_cyclic_sequence({.period = 20, .num_cycles = 3});
  for (AnalysisConfig bad : {AnalysisConfig{.epsilon = 0.0}, AnalysisConfig{.cluster_gap_mult = -1.0},
                             AnalysisConfig{.template_length = -3}}) {
    try {
      analyze_sequence(seq, bad);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidConfig);
    }
  }
  try {
    analyze_sequence(seq, {.template_length = 31});
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TemplateTooLong);
  }
}

TEST_CASE("analyze report layout") {
  const AnalysisConfig config{.mean = MeanMethod::Barycenter};
  const auto a = analyze({.period = 24, .num_cycles = 4, .noise_sigma = 0.01, .seed = 2}, config);
  const auto j = analyze_report_json(a, config);
  CHECK(keys(j) == std::vector<std::string>{"schema_version", "command", "config", "frames", "template_length",
                                            "exclusion", "period", "num_cycles", "minima_used", "cycle_ranges",
                                            "barycenter_fallbacks", "per_pose"});
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["command"] == "analyze");
  CHECK(j["config"]["mean"] == "barycenter");
  CHECK(keys(j["config"]) ==
        std::vector<std::string>{"template_len", "min_exclusion", "cluster_gap_mult", "mean", "epsilon"});
  CHECK(j["per_pose"].size() == a.stats.size());
  CHECK(keys(j["per_pose"][0]) == std::vector<std::string>{"anchor_index", "members", "sigma", "precision"});
  CHECK(j["cycle_ranges"].size() == static_cast<std::size_t>(j["num_cycles"].get<int>()));
  check_finite(j);
}

TEST_CASE("self comparison") {
  const auto a = analyze({.period = 30, .num_cycles = 4, .noise_sigma = 0.02, .seed = 5});
  const auto c = compare_analyses(a, a);
  REQUIRE(c.per_pose.size() == a.stats.size());
  for (const auto& r : c.per_pose) {
    CHECK(std::abs(r.fit - 1.0) < 1e-6);
    CHECK(r.mean_pose_distance < 1e-7);
    CHECK(r.trainer_sigma == r.user_sigma);
  }
  const auto j = compare_report_json(a, a, c, {});
  CHECK(keys(j) == std::vector<std::string>{"schema_version", "command", "config", "period", "num_cycles", "trainer",
                                            "user", "per_pose", "best_index", "worst_index", "best_fit",
                                            "worst_fit"});
  CHECK(keys(j["per_pose"][0]) == std::vector<std::string>{"anchor_index", "trainer_sigma", "user_sigma",
                                                           "trainer_precision", "user_precision",
                                                           "mean_pose_distance", "fit"});
  check_finite(j);
}

TEST_CASE("noisier user scores above one") {
  const auto trainer = analyze({.period = 40, .num_cycles = 6, .noise_sigma = 0.01, .seed = 1});
  const auto user = analyze({.period = 40, .num_cycles = 6, .noise_sigma = 0.03, .seed = 2});
  auto median_fit = [](const ComparisonReport& c) {
    std::vector<double> f;
    for (const auto& r : c.per_pose) f.push_back(r.fit);
    std::sort(f.begin(), f.end());
    return f[f.size() / 2];
  };
  const auto forward = compare_analyses(trainer, user);
  CHECK(median_fit(forward) > 1.0);
  CHECK(forward.per_pose[forward.worst_index].fit >= forward.per_pose[forward.best_index].fit);
  CHECK(median_fit(compare_analyses(user, trainer)) < 1.0);
}

TEST_CASE("csv and svg") {
  ComparisonReport c;
  for (int i = 0; i < 4; ++i) c.per_pose.push_back({i, 0.1, 0.2, 10.0, 5.0, 0.01, 1.0 + i});
  c.best_index = 0;
  c.worst_index = 3;
  const auto csv = comparison_csv(c);
  CHECK(csv.rfind("anchor_index,trainer_sigma,user_sigma,trainer_precision,user_precision,mean_pose_distance,fit\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find("\n3,0.1,0.2,10,5,0.01,4\n") != std::string::npos);

  const auto svg = comparison_svg(c);
  CHECK(svg.rfind("<svg", 0) == 0);
  const std::regex series("class=\"series\" data-label=\"([a-z ]+)\"");
  std::vector<std::string> labels;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), series); it != std::sregex_iterator(); ++it)
    labels.push_back((*it)[1]);
  CHECK(labels == std::vector<std::string>{"trainer precision", "user precision", "fit"});
  CHECK(svg.find("data-label=\"worst\"") != std::string::npos);
  CHECK(svg.find("pose:3 - fit:4") != std::string::npos);
  CHECK(comparison_svg(ComparisonReport{}).find("data-label=\"fit\"") != std::string::npos);
}

TEST_CASE("reports do not depend on the thread count") {
  const auto seq = generate_cyclic_sequence({.period = 32, .num_cycles = 5, .noise_sigma = 0.02, .phase_jitter = 2, .seed = 3});
  const AnalysisConfig config{.mean = MeanMethod::Barycenter};
  std::vector<std::string> dumps;
  for (const char* threads : {"1", "3", "8"}) {
    ::setenv("CYCLESTAT_THREADS", threads, 1);
    const auto a = analyze_sequence(seq, config);
    dumps.push_back(analyze_report_json(a, config).dump(2));
  }
  ::unsetenv("CYCLESTAT_THREADS");
  CHECK(dumps[0] == dumps[1]);
  CHECK(dumps[0] == dumps[2]);
}

}  // TEST_SUITE
