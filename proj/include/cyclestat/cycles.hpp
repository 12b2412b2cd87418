#pragma once

// Period detection through the cycle-profile function and cycle segmentation.

#include "cyclestat/manifold.hpp"

#include <span>
#include <utility>
#include <vector>

namespace cyclestat {

struct CycleProfile {
  std::vector<double> values;  // indexed by window start t
  int template_length = 0;
};

struct CycleSegmentation {
  double period = 0.0;
  std::vector<std::pair<int, int>> cycle_ranges;  // inclusive [start, end]
  std::vector<int> minima_used;

  int num_cycles() const { return static_cast<int>(cycle_ranges.size()); }
};

/// One agglomeration step: clusters `a` and `b` merged at `height`.
struct Merge {
  int a = 0;
  int b = 0;
  double height = 0.0;
};

/// values[t] = sequence_distance(seq[0, T), seq[t, t + T)) for every t.
CycleProfile cycle_profile(std::span<const GramMatrix> seq, int template_length);

/// Window starts t > 0 whose value is <= every value within `exclusion`
/// frames; only the first index of a flat run is kept.
std::vector<int> find_local_minima(const CycleProfile& profile, int exclusion);

/// Single-linkage agglomerative clustering of 1-D values, built as a minimum
/// spanning tree (Prim). Returns n - 1 merges in increasing height; cluster
/// ids >= n refer to earlier merges (id n + k is the result of merge k).
std::vector<Merge> single_linkage(std::span<const double> values);

/// Cluster labels after cutting the dendrogram above `threshold` (merges
/// with height <= threshold are applied). Labels are 0..k-1 in order of first
/// appearance.
std::vector<int> cut_dendrogram(std::span<const Merge> merges, int n, double threshold);

struct ClusterOptions {
  double gap_multiplier = 2.0;
  double relative_floor = 1.0;
};

/// Selects the period minima: single-linkage clusters the minima by value and
/// cuts the dendrogram at max(gap_multiplier x lower-median gap between sorted
/// values, relative_floor x lowest value). Returns the (ascending) indices of
/// the lowest-mean cluster with at least 2 members, or every index when no
/// such cluster exists.
std::vector<int> cluster_minima(std::span<const std::pair<int, double>> minima,
                                const ClusterOptions& options = {});

/// Mean gap between consecutive selected minima; a single index is itself the
/// period.
double estimate_period(std::span<const int> selected_indices);

/// Fixed-length blocks of round(period) frames from frame 0; a trailing
/// partial block is dropped.
CycleSegmentation segment_cycles(int sequence_length, double period);

/// max(2, seq_len / 8).
int auto_template_length(int sequence_length);

struct PeriodOptions {
  int template_length = 0;  // 0 = auto_template_length, shortened if longer than the period
  int exclusion = 0;        // 0 = max(1, template_length / 2)
  double gap_multiplier = 2.0;
};

struct PeriodDetection {
  CycleProfile profile;
  std::vector<int> minima;
  CycleSegmentation segmentation;
  int exclusion = 0;
};

/// Profile, minima, clustering, period and segmentation in one go.
PeriodDetection detect_cycles(std::span<const GramMatrix> seq, const PeriodOptions& options);

}  // namespace cyclestat
