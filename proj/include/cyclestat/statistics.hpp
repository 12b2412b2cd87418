#pragma once

// Cross-cycle pose-sets, cross-sectional mean/deviation, precision and fit.

#include "cyclestat/alignment.hpp"
#include "cyclestat/manifold.hpp"

#include <span>
#include <vector>

namespace cyclestat {

struct PoseSetMember {
  int cycle_id = 0;
  int frame = 0;  // index within its cycle
  GramMatrix gram;
};

struct PoseSet {
  int anchor_index = 0;
  std::vector<PoseSetMember> members;  // ordered by (cycle_id, frame)
};

inline constexpr double kDefaultPrecisionEpsilon = 1e-6;

struct PoseSetStats {
  GramMatrix mean_pose;
  double avg_deviation = 0.0;
  double precision = 0.0;
  bool barycenter_fallback = false;
};

struct PoseFit {
  int anchor_index = 0;
  double trainer_precision = 0.0;
  double user_precision = 0.0;
  double fit = 0.0;
};

struct FitReport {
  std::vector<PoseFit> per_pose;
  int best_index = 0;   // anchor with the smallest fit
  int worst_index = 0;  // anchor with the largest fit
};

enum class MeanMethod { Medoid, Barycenter };

/// Chains DTW between consecutive cycles and composes the correspondences so
/// every frame of cycle 0 collects its matches in every later cycle.
std::vector<PoseSet> build_pose_sets(const std::vector<std::vector<GramMatrix>>& cycles);

/// Member minimizing the summed distance to the others (first on ties).
std::size_t medoid_index(std::span<const PoseSetMember> members);

struct BarycenterOptions {
  int max_iterations = 100;
  double tolerance = 1e-8;
};

struct BarycenterResult {
  GramMatrix mean;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residuals;  // delta between successive iterates
  std::vector<double> objective;  // mean squared distance to the members, per iterate
};

/// Fixed point of Y <- mean_i F_i U_i, U_i the orthogonal Procrustes rotation
/// aligning member factor F_i to Y. The barycenter is sought among matrices
/// whose rank is at most the widest member factor. Starts at the medoid.
BarycenterResult barycenter(std::span<const PoseSetMember> members,
                            const BarycenterOptions& options = {});

struct MeanPose {
  GramMatrix pose;
  bool barycenter_fallback = false;  // barycenter did not converge, medoid used
};

MeanPose mean_pose(const PoseSet& set, MeanMethod method);

double average_deviation(const PoseSet& set, const GramMatrix& mu);

/// 1 / (sigma + epsilon).
double precision_index(double sigma, double epsilon = kDefaultPrecisionEpsilon);

PoseSetStats pose_set_stats(const PoseSet& set, MeanMethod method,
                            double epsilon = kDefaultPrecisionEpsilon);

std::vector<PoseSetStats> all_pose_set_stats(std::span<const PoseSet> sets, MeanMethod method,
                                             double epsilon = kDefaultPrecisionEpsilon);

/// DTW path with the trainer means as sequence A and the user means as B.
WarpingPath align_mean_sequences(std::span<const GramMatrix> user_means,
                                 std::span<const GramMatrix> trainer_means);

/// Per trainer anchor i: f_i = trainer precision / mean user precision over
/// the user indices matched to i by `path`.
FitReport fit_indices(std::span<const PoseSetStats> trainer_stats,
                      std::span<const PoseSetStats> user_stats, const WarpingPath& path);

}  // namespace cyclestat
