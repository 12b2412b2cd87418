// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "cyclestat/cycles.hpp"
#include "cyclestat/manifold.hpp"
#include "cyclestat/report.hpp"
#include "cyclestat/statistics.hpp"
#include "cyclestat/synth.hpp"
#include "helpers.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

using namespace cyclestat;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<GramMatrix> grams_of(const PoseSequence& seq) {
  const auto norm = normalize_sequence(seq);
  std::vector<GramMatrix> out;
  for (const auto& p : norm.poses) out.push_back(gram_of(p));
  return out;
}

Outcome closed_form_distance() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> eig(0.0, 10.0);
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::MatrixXd basis = test::random_orthogonal(rng, 25).leftCols(2);
    const std::array<double, 2> l{eig(rng), eig(rng)}, m{eig(rng), eig(rng)};
    const Eigen::MatrixXd gl = basis * Eigen::Vector2d(l[0], l[1]).asDiagonal() * basis.transpose();
    const Eigen::MatrixXd gm = basis * Eigen::Vector2d(m[0], m[1]).asDiagonal() * basis.transpose();
    const Eigen::MatrixXd sym_l = 0.5 * (gl + gl.transpose()), sym_m = 0.5 * (gm + gm.transpose());
    const double d = geodesic_distance(GramMatrix::from_entries(sym_l, 2), GramMatrix::from_entries(sym_m, 2));
    worst = std::max(worst, std::abs(d - commuting_distance_oracle(l, m)));
  }
  const double elapsed = seconds_since(t0);
  return {worst < 1e-8 && elapsed < 5.0, fmt("max |err| %.2e, %.2f s", worst, elapsed)};
}

Outcome metric_properties() {
  std::mt19937_64 rng(202);
  double asym = 0.0, self = 0.0, excess = -1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = test::random_gram(rng), b = test::random_gram(rng), c = test::random_gram(rng);
    const double ab = geodesic_distance(a, b), ba = geodesic_distance(b, a);
    asym = std::max(asym, std::abs(ab - ba));
    self = std::max(self, geodesic_distance(a, a));
    excess = std::max(excess, geodesic_distance(a, c) - ab - geodesic_distance(b, c));
  }
  return {asym < 1e-9 && self < 1e-7 && excess <= 1e-7,
          fmt("max asymmetry %.2e, max self-distance %.2e, max triangle excess %.2e", asym, self, excess)};
}

Outcome transform_invariance() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586), scale(0.1, 10.0), shift(-1000.0, 1000.0);
  const auto model = SkeletonModel::body25();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto pose = test::random_pose(rng);
    SkeletonPose moved = pose;
    moved.coords = ((scale(rng) * pose.coords) * test::rotation2d(angle(rng)).transpose()).rowwise() +
                   Eigen::RowVector2d(shift(rng), shift(rng));
    const double d = geodesic_distance(gram_of(normalize_pose(pose, model)), gram_of(normalize_pose(moved, model)));
    worst = std::max(worst, d);
  }
  return {worst < 1e-7, fmt("max distance %.2e over 100 poses", worst)};
}

Outcome dtw_exhaustive() {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> len(1, 6);
  int mismatches = 0, invalid = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<GramMatrix> a, b;
    for (int k = len(rng); k > 0; --k) a.push_back(test::random_gram(rng));
    for (int k = len(rng); k > 0; --k) b.push_back(test::random_gram(rng));
    const auto r = dtw(a, b);
    if (r.total_cost != brute_force_dtw(pairwise_distances(a, b))) ++mismatches;
    if (!r.path.is_valid(static_cast<int>(a.size()), static_cast<int>(b.size()))) ++invalid;
  }
  return {mismatches == 0 && invalid == 0,
          fmt("%.0f cost mismatches, %.0f invalid paths in 200 trials", mismatches, invalid)};
}

Outcome period_recovery() {
  bool pass = true;
  std::string detail;
  for (int p0 : {20, 40, 80}) {
    int exact = 0, close = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const int cycles = 4 + static_cast<int>(seed % 5);
      const auto clean = detect_cycles(grams_of(generate_cyclic_sequence(
                                           {.period = p0, .num_cycles = cycles, .seed = seed})),
                                       {});
      if (clean.segmentation.period == p0) ++exact;
      const auto noisy = detect_cycles(grams_of(generate_cyclic_sequence({.period = p0,
                                                                          .num_cycles = cycles,
                                                                          .noise_sigma = 0.01,
                                                                          .phase_jitter = 2,
                                                                          .seed = seed})),
                                       {});
      if (std::abs(noisy.segmentation.period - p0) <= 2.0) ++close;
    }
    pass = pass && exact == 100 && close >= 95;
    detail += fmt("P0=%.0f exact %.0f/100 noisy %.0f/100; ", p0, exact, close);
  }

  // 1000 frames: 25 cycles of 40
  const auto seq = generate_cyclic_sequence({.period = 40, .num_cycles = 25, .noise_sigma = 0.01, .phase_jitter = 2, .seed = 1});
  const auto t0 = Clock::now();
  const auto analysis = analyze_sequence(seq, {});
  const double elapsed = seconds_since(t0);
  pass = pass && elapsed < 10.0 && std::abs(analysis.detection.segmentation.period - 40.0) <= 2.0;
  detail += fmt("1000-frame run %.2f s (P=%.2f)", elapsed, analysis.detection.segmentation.period);
  return {pass, detail};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> fit_values(const ComparisonReport& c) {
  std::vector<double> f;
  for (const auto& r : c.per_pose) f.push_back(r.fit);
  return f;
}

Outcome fit_direction() {
  const auto trainer = analyze_sequence(
      generate_cyclic_sequence({.period = 40, .num_cycles = 6, .noise_sigma = 0.01, .seed = 11}), {});
  const auto user = analyze_sequence(
      generate_cyclic_sequence({.period = 40, .num_cycles = 6, .noise_sigma = 0.03, .seed = 12}), {});
  const auto forward = fit_values(compare_analyses(trainer, user));
  const auto swapped = fit_values(compare_analyses(user, trainer));
  const auto self = fit_values(compare_analyses(trainer, trainer));
  const double above = static_cast<double>(std::count_if(forward.begin(), forward.end(), [](double f) { return f > 1.0; })) /
                       static_cast<double>(forward.size());
  double self_err = 0.0;
  for (double f : self) self_err = std::max(self_err, std::abs(f - 1.0));
  const bool pass = median(forward) > 1.0 && above >= 0.9 && median(swapped) < 1.0 && self_err < 1e-6;
  return {pass, fmt("median fit %.3f (%.0f%% above 1), swapped median %.3f", median(forward), 100.0 * above,
                    median(swapped)) +
                    fmt(", self max |f-1| %.1e", self_err)};
}

PoseSet set_of(const std::vector<GramMatrix>& grams) {
  PoseSet s;
  for (std::size_t k = 0; k < grams.size(); ++k) s.members.push_back({static_cast<int>(k), 0, grams[k]});
  return s;
}

Outcome barycenter_checks() {
  std::mt19937_64 rng(707);
  double same_err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = test::random_gram(rng);
    const auto r = barycenter(set_of({g, g}).members);
    same_err = std::max(same_err, (r.mean.entries() - g.entries()).norm());
  }

  const auto d1 = GramMatrix::from_entries(Eigen::Matrix2d::Identity(), 2);
  const auto d9 = GramMatrix::from_entries(9.0 * Eigen::Matrix2d::Identity(), 2);
  const auto commuting = barycenter(set_of({d1, d9}).members);
  const double commuting_err = (commuting.mean.entries() - 4.0 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();

  int increasing = 0, unconverged = 0;
  std::uniform_int_distribution<int> size(3, 8);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd center = test::gaussian(rng, 25, 2);
    std::vector<GramMatrix> grams;
    for (int m = size(rng); m > 0; --m)
      grams.push_back(GramMatrix::from_factor(center + 0.3 * test::gaussian(rng, 25, 2), 2));
    const auto r = barycenter(set_of(grams).members);
    if (!r.converged) ++unconverged;
    for (std::size_t k = 1; k < r.residuals.size(); ++k)
      if (r.residuals[k] > r.residuals[k - 1] * (1 + 1e-9) + 1e-15) ++increasing;
  }
  const bool pass = same_err < 1e-8 && commuting.converged && commuting.iterations <= 100 &&
                    commuting_err < 1e-6 && increasing == 0 && unconverged == 0;
  return {pass, fmt("{G,G} err %.1e, diag(4,4) err %.1e", same_err, commuting_err) +
                    fmt(" in %.0f iterations, %.0f residual increases", commuting.iterations, increasing)};
}

std::string run_capture(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int raw = pclose(pipe);
  if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0) out = "exit " + std::to_string(raw) + "\n" + out;
  return out;
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "cyclestat_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string bin = CYCLESTAT_BIN;
  run_capture(bin + " synth --period 40 --cycles 5 --noise 0.01 --phase-jitter 2 --seed 7 --out '" +
              (dir / "t.jsonl").string() + "'");
  run_capture(bin + " synth --period 40 --cycles 5 --noise 0.03 --phase-jitter 2 --seed 8 --out '" +
              (dir / "u.jsonl").string() + "'");

  std::vector<std::string> analyze, compare;
  for (const char* threads : {"1", "1", "8", "8"}) {
    const std::string env = std::string("CYCLESTAT_THREADS=") + threads + " ";
    analyze.push_back(run_capture(env + bin + " synth --period 40 --cycles 4 --noise 0.01 --seed 3 | " + env + bin +
                                  " analyze - --mean barycenter"));
    compare.push_back(run_capture(env + bin + " compare '" + (dir / "t.jsonl").string() + "' '" +
                                  (dir / "u.jsonl").string() + "'"));
  }
  fs::remove_all(dir);

  const bool ok = analyze[0].rfind("{", 0) == 0 && compare[0].rfind("{", 0) == 0 &&
                  std::all_of(analyze.begin(), analyze.end(), [&](const std::string& s) { return s == analyze[0]; }) &&
                  std::all_of(compare.begin(), compare.end(), [&](const std::string& s) { return s == compare[0]; });
  return {ok, fmt("analyze %.0f bytes, compare %.0f bytes, 2 runs x threads {1, 8}",
                  static_cast<double>(analyze[0].size()), static_cast<double>(compare[0].size()))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"distance matches closed form on commuting pairs", closed_form_distance},
      {"distance metric properties", metric_properties},
      {"rotation/translation/scale invariance", transform_invariance},
      {"DTW equals exhaustive search", dtw_exhaustive},
      {"period recovery on synthetic sequences", period_recovery},
      {"fit index direction and self-comparison", fit_direction},
      {"barycenter option", barycenter_checks},
      {"end-to-end determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %zu. %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
