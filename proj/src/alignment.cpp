#include "cyclestat/alignment.hpp"

#include "cyclestat/error.hpp"
#include "cyclestat/parallel.hpp"

#include <algorithm>
#include <cstdint>

namespace cyclestat {

bool WarpingPath::is_valid(int len_a, int len_b) const {
  if (pairs.empty() || len_a <= 0 || len_b <= 0) return false;
  if (pairs.front() != std::pair{0, 0}) return false;
  if (pairs.back() != std::pair{len_a - 1, len_b - 1}) return false;
  for (std::size_t k = 1; k < pairs.size(); ++k) {
    const int di = pairs[k].first - pairs[k - 1].first;
    const int dj = pairs[k].second - pairs[k - 1].second;
    if (di < 0 || dj < 0 || di > 1 || dj > 1 || di + dj == 0) return false;
  }
  return true;
}

namespace {

enum Step : std::uint8_t { kStart = 0, kDiagonal = 1, kAdvanceB = 2, kAdvanceA = 3 };

// Row-by-row DTW recursion. Cumulative cost of a cell is the predecessor's
// cumulative cost plus the local cost, so sums accumulate in path order.
// `steps`, when given, receives the chosen predecessor of every cell.
std::pair<double, int> dtw_recursion(const CostTable& costs, std::vector<std::uint8_t>* steps) {
  const Eigen::Index la = costs.rows();
  const Eigen::Index lb = costs.cols();
  if (la == 0 || lb == 0) throw Error(ErrorCode::EmptySequence, "DTW needs non-empty sequences");

  std::vector<double> prev_cost(lb), cur_cost(lb);
  std::vector<int> prev_len(lb), cur_len(lb);
  if (steps != nullptr) steps->assign(static_cast<std::size_t>(la * lb), kStart);

  for (Eigen::Index i = 0; i < la; ++i) {
    for (Eigen::Index j = 0; j < lb; ++j) {
      double best = 0.0;
      int best_len = 0;
      Step step = kStart;
      if (i > 0 && j > 0) {
        best = prev_cost[j - 1];
        best_len = prev_len[j - 1];
        step = kDiagonal;
      }
      if (j > 0 && (step == kStart || cur_cost[j - 1] < best)) {
        best = cur_cost[j - 1];
        best_len = cur_len[j - 1];
        step = kAdvanceB;
      }
      if (i > 0 && (step == kStart || prev_cost[j] < best)) {
        best = prev_cost[j];
        best_len = prev_len[j];
        step = kAdvanceA;
      }
      cur_cost[j] = step == kStart ? costs(i, j) : best + costs(i, j);
      cur_len[j] = best_len + 1;
      if (steps != nullptr) (*steps)[static_cast<std::size_t>(i * lb + j)] = step;
    }
    std::swap(prev_cost, cur_cost);
    std::swap(prev_len, cur_len);
  }
  return {prev_cost[lb - 1], prev_len[lb - 1]};
}

}  // namespace

AlignmentResult dtw_on_costs(const CostTable& costs) {
  std::vector<std::uint8_t> steps;
  const auto [total, length] = dtw_recursion(costs, &steps);
  const Eigen::Index lb = costs.cols();

  AlignmentResult result;
  result.total_cost = total;
  result.normalized_cost = total / length;
  auto& pairs = result.path.pairs;
  pairs.reserve(static_cast<std::size_t>(length));
  int i = static_cast<int>(costs.rows()) - 1;
  int j = static_cast<int>(lb) - 1;
  while (true) {
    pairs.emplace_back(i, j);
    const auto step = steps[static_cast<std::size_t>(i * lb + j)];
    if (step == kStart) break;
    if (step != kAdvanceB) --i;
    if (step != kAdvanceA) --j;
  }
  std::reverse(pairs.begin(), pairs.end());
  return result;
}

std::pair<double, int> dtw_cost_on_costs(const CostTable& costs) {
  return dtw_recursion(costs, nullptr);
}

Eigen::MatrixXd pairwise_distances(std::span<const GramMatrix> a, std::span<const GramMatrix> b) {
  Eigen::MatrixXd d(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  parallel_for(a.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = geodesic_distance(a[i], b[j]);
    }
  });
  return d;
}

AlignmentResult dtw(std::span<const GramMatrix> a, std::span<const GramMatrix> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySequence, "DTW needs non-empty sequences");
  return dtw_on_costs(pairwise_distances(a, b));
}

double sequence_distance(std::span<const GramMatrix> a, std::span<const GramMatrix> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySequence, "DTW needs non-empty sequences");
  const auto [total, length] = dtw_cost_on_costs(pairwise_distances(a, b));
  return total / length;
}

std::vector<std::vector<int>> correspondences(const WarpingPath& path) {
  std::vector<std::vector<int>> matched;
  if (path.pairs.empty()) return matched;
  matched.resize(static_cast<std::size_t>(path.pairs.back().first) + 1);
  for (const auto& [i, j] : path.pairs) matched[static_cast<std::size_t>(i)].push_back(j);
  return matched;
}

}  // namespace cyclestat
