#include "cyclestat/statistics.hpp"

#include "cyclestat/error.hpp"
#include "cyclestat/parallel.hpp"

#include <algorithm>

namespace cyclestat {

std::vector<PoseSet> build_pose_sets(const std::vector<std::vector<GramMatrix>>& cycles) {
  if (cycles.size() < 2) throw Error(ErrorCode::TooFewCycles, "pose-sets need at least 2 cycles");
  for (const auto& c : cycles) {
    if (c.empty()) throw Error(ErrorCode::EmptySequence, "empty cycle");
  }

  // links[c][i]: frames of cycle c + 1 matched to frame i of cycle c.
  std::vector<std::vector<std::vector<int>>> links(cycles.size() - 1);
  parallel_for(links.size(),
               [&](std::size_t c) { links[c] = correspondences(dtw(cycles[c], cycles[c + 1]).path); });

  const int anchors = static_cast<int>(cycles.front().size());
  std::vector<PoseSet> sets(static_cast<std::size_t>(anchors));
  for (int k = 0; k < anchors; ++k) {
    PoseSet& set = sets[k];
    set.anchor_index = k;
    set.members.push_back({0, k, cycles[0][k]});
    // Matches are contiguous and monotone, so a frame range maps to a range.
    int lo = k, hi = k;
    for (std::size_t c = 0; c + 1 < cycles.size(); ++c) {
      const int next_lo = links[c][lo].front();
      const int next_hi = links[c][hi].back();
      lo = next_lo;
      hi = next_hi;
      for (int f = lo; f <= hi; ++f)
        set.members.push_back({static_cast<int>(c + 1), f, cycles[c + 1][f]});
    }
  }
  return sets;
}

std::size_t medoid_index(std::span<const PoseSetMember> members) {
  if (members.empty()) throw Error(ErrorCode::EmptySet, "pose-set is empty");
  const std::size_t m = members.size();
  std::vector<double> total(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const double d = geodesic_distance(members[a].gram, members[b].gram);
      total[a] += d;
      total[b] += d;
    }
  }
  return static_cast<std::size_t>(std::min_element(total.begin(), total.end()) - total.begin());
}

namespace {

double factor_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b * procrustes_rotation(a, b)).norm();
}

double mean_squared_distance(const std::vector<Eigen::MatrixXd>& factors, const Eigen::MatrixXd& y) {
  double sum = 0.0;
  for (const auto& f : factors) {
    const double d = factor_distance(y, f);
    sum += d * d;
  }
  return sum / static_cast<double>(factors.size());
}

}  // namespace

BarycenterResult barycenter(std::span<const PoseSetMember> members, const BarycenterOptions& options) {
  if (members.empty()) throw Error(ErrorCode::EmptySet, "pose-set is empty");

  Eigen::Index width = 0;
  int rank_bound = 0;
  for (const auto& m : members) {
    width = std::max(width, m.gram.factor().cols());
    rank_bound = std::max(rank_bound, m.gram.rank_bound());
  }
  std::vector<Eigen::MatrixXd> factors;
  factors.reserve(members.size());
  for (const auto& m : members) factors.push_back(pad_columns(m.gram.factor(), width));

  BarycenterResult result;
  Eigen::MatrixXd y = factors[medoid_index(members)];
  result.objective.push_back(mean_squared_distance(factors, y));

  for (int it = 0; it < options.max_iterations; ++it) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(y.rows(), y.cols());
    for (const auto& f : factors) next += f * procrustes_rotation(y, f);
    next /= static_cast<double>(factors.size());

    const double step = factor_distance(next, y);
    y = std::move(next);
    result.iterations = it + 1;
    result.residuals.push_back(step);
    result.objective.push_back(mean_squared_distance(factors, y));
    if (step < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.mean = GramMatrix::from_factor(std::move(y), rank_bound);
  return result;
}

MeanPose mean_pose(const PoseSet& set, MeanMethod method) {
  if (set.members.empty()) throw Error(ErrorCode::EmptySet, "pose-set is empty");
  const auto& medoid = set.members[medoid_index(set.members)].gram;
  if (method == MeanMethod::Medoid) return {medoid, false};

  auto bary = barycenter(set.members);
  if (!bary.converged) return {medoid, true};
  return {std::move(bary.mean), false};
}

double average_deviation(const PoseSet& set, const GramMatrix& mu) {
  if (set.members.empty()) throw Error(ErrorCode::EmptySet, "pose-set is empty");
  double sum = 0.0;
  for (const auto& m : set.members) sum += geodesic_distance(m.gram, mu);
  return sum / static_cast<double>(set.members.size());
}

double precision_index(double sigma, double epsilon) { return 1.0 / (sigma + epsilon); }

PoseSetStats pose_set_stats(const PoseSet& set, MeanMethod method, double epsilon) {
  auto [mu, fallback] = mean_pose(set, method);
  PoseSetStats stats;
  stats.avg_deviation = average_deviation(set, mu);
  stats.precision = precision_index(stats.avg_deviation, epsilon);
  stats.mean_pose = std::move(mu);
  stats.barycenter_fallback = fallback;
  return stats;
}

std::vector<PoseSetStats> all_pose_set_stats(std::span<const PoseSet> sets, MeanMethod method,
                                             double epsilon) {
  std::vector<PoseSetStats> stats(sets.size());
  parallel_for(sets.size(), [&](std::size_t k) { stats[k] = pose_set_stats(sets[k], method, epsilon); });
  return stats;
}

WarpingPath align_mean_sequences(std::span<const GramMatrix> user_means,
                                 std::span<const GramMatrix> trainer_means) {
  return dtw(trainer_means, user_means).path;
}

FitReport fit_indices(std::span<const PoseSetStats> trainer_stats,
                      std::span<const PoseSetStats> user_stats, const WarpingPath& path) {
  const int nt = static_cast<int>(trainer_stats.size());
  const int nu = static_cast<int>(user_stats.size());
  if (!path.is_valid(nt, nu)) {
    throw Error(ErrorCode::PathMismatch, "path does not span " + std::to_string(nt) + " trainer x " +
                                             std::to_string(nu) + " user pose-sets");
  }
  const auto matched = correspondences(path);

  FitReport report;
  report.per_pose.reserve(static_cast<std::size_t>(nt));
  for (int i = 0; i < nt; ++i) {
    double user_precision = 0.0;
    for (int j : matched[i]) user_precision += user_stats[j].precision;
    user_precision /= static_cast<double>(matched[i].size());

    PoseFit entry;
    entry.anchor_index = i;
    entry.trainer_precision = trainer_stats[i].precision;
    entry.user_precision = user_precision;
    entry.fit = entry.trainer_precision / user_precision;
    report.per_pose.push_back(entry);
  }

  for (int i = 1; i < nt; ++i) {
    if (report.per_pose[i].fit < report.per_pose[report.best_index].fit) report.best_index = i;
    if (report.per_pose[i].fit > report.per_pose[report.worst_index].fit) report.worst_index = i;
  }
  return report;
}

}  // namespace cyclestat
