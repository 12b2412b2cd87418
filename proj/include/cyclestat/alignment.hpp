#pragma once

// Dynamic time warping over Gram-matrix sequences.

#include "cyclestat/manifold.hpp"

#include <Eigen/Core>

#include <span>
#include <utility>
#include <vector>

namespace cyclestat {

struct WarpingPath {
  std::vector<std::pair<int, int>> pairs;

  std::size_t size() const { return pairs.size(); }
  /// Boundary, monotonicity and unit-step continuity for a len_a x len_b grid.
  bool is_valid(int len_a, int len_b) const;
};

struct AlignmentResult {
  WarpingPath path;
  double total_cost = 0.0;
  double normalized_cost = 0.0;  // total_cost / path length
};

/// Local cost table: rows index sequence A, columns sequence B.
using CostTable = Eigen::Ref<const Eigen::MatrixXd>;

/// DTW with steps (1,0), (0,1), (1,1), no window. When cumulative costs tie
/// exactly the predecessor is chosen diagonal first, then (0,1), then (1,0).
AlignmentResult dtw_on_costs(const CostTable& costs);

/// Cost-only variant of dtw_on_costs: same recursion and tie-breaking, no
/// path storage. Returns {total_cost, path_length}.
std::pair<double, int> dtw_cost_on_costs(const CostTable& costs);

Eigen::MatrixXd pairwise_distances(std::span<const GramMatrix> a, std::span<const GramMatrix> b);

AlignmentResult dtw(std::span<const GramMatrix> a, std::span<const GramMatrix> b);

/// Path-length-normalized DTW cost.
double sequence_distance(std::span<const GramMatrix> a, std::span<const GramMatrix> b);

/// For each index i of A, the matched indices of B, sorted ascending.
std::vector<std::vector<int>> correspondences(const WarpingPath& path);

}  // namespace cyclestat
