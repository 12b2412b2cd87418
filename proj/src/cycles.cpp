#include "cyclestat/cycles.hpp"

#include "cyclestat/alignment.hpp"
#include "cyclestat/error.hpp"
#include "cyclestat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cyclestat {

CycleProfile cycle_profile(std::span<const GramMatrix> seq, int template_length) {
  const int n = static_cast<int>(seq.size());
  if (template_length < 2) throw Error(ErrorCode::TemplateTooShort, "template length must be >= 2");
  if (2 * template_length > n) {
    throw Error(ErrorCode::TemplateTooLong, "template length " + std::to_string(template_length) +
                                                " exceeds half of " + std::to_string(n) + " frames");
  }

  // Every window compares against the same template, so the local costs are
  // all entries of one T x N table.
  const Eigen::MatrixXd table = pairwise_distances(seq.first(template_length), seq);

  CycleProfile profile;
  profile.template_length = template_length;
  profile.values.resize(static_cast<std::size_t>(n - template_length + 1));
  parallel_for(profile.values.size(), [&](std::size_t t) {
    const auto [total, length] =
        dtw_cost_on_costs(table.middleCols(static_cast<Eigen::Index>(t), template_length));
    profile.values[t] = total / length;
  });
  return profile;
}

std::vector<int> find_local_minima(const CycleProfile& profile, int exclusion) {
  if (exclusion < 1) throw Error(ErrorCode::InvalidConfig, "exclusion radius must be >= 1");
  const auto& v = profile.values;
  const int n = static_cast<int>(v.size());

  auto qualifies = [&](int t) {
    const int lo = std::max(0, t - exclusion);
    const int hi = std::min(n - 1, t + exclusion);
    for (int u = lo; u <= hi; ++u) {
      if (v[u] < v[t]) return false;
    }
    return true;
  };

  std::vector<int> minima;
  bool previous_qualified = true;  // index 0 is a trivial self-match
  for (int t = 1; t < n; ++t) {
    const bool q = qualifies(t);
    const bool continues_run = v[t] == v[t - 1] && previous_qualified;
    if (q && !continues_run) minima.push_back(t);
    previous_qualified = q;
  }
  return minima;
}

std::vector<Merge> single_linkage(std::span<const double> values) {
  const int n = static_cast<int>(values.size());
  if (n < 2) return {};

  // Prim's minimum spanning tree on |a - b|.
  struct Edge {
    int u, v;
    double w;
  };
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n - 1));
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  int current = 0;
  in_tree[0] = true;
  for (int added = 1; added < n; ++added) {
    int next = -1;
    for (int k = 0; k < n; ++k) {
      if (in_tree[k]) continue;
      const double d = std::abs(values[k] - values[current]);
      if (d < best[k]) {
        best[k] = d;
        parent[k] = current;
      }
      if (next < 0 || best[k] < best[next]) next = k;
    }
    in_tree[next] = true;
    edges.push_back({parent[next], next, best[next]});
    current = next;
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.w < b.w; });

  // Union-find over points; each root remembers its current cluster id.
  std::vector<int> root(n);
  std::iota(root.begin(), root.end(), 0);
  std::vector<int> cluster_id(n);
  std::iota(cluster_id.begin(), cluster_id.end(), 0);
  auto find = [&](int x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };

  std::vector<Merge> merges;
  merges.reserve(edges.size());
  for (const Edge& e : edges) {
    const int ru = find(e.u);
    const int rv = find(e.v);
    const int a = std::min(cluster_id[ru], cluster_id[rv]);
    const int b = std::max(cluster_id[ru], cluster_id[rv]);
    root[rv] = ru;
    cluster_id[ru] = n + static_cast<int>(merges.size());
    merges.push_back({a, b, e.w});
  }
  return merges;
}

std::vector<int> cut_dendrogram(std::span<const Merge> merges, int n, double threshold) {
  // Each cluster id (leaf or merge) resolves to a representative leaf.
  std::vector<int> representative(static_cast<std::size_t>(n) + merges.size());
  std::iota(representative.begin(), representative.begin() + n, 0);
  std::vector<int> root(n);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (std::size_t k = 0; k < merges.size(); ++k) {
    const int ra = representative[merges[k].a];
    const int rb = representative[merges[k].b];
    representative[n + k] = ra;
    if (merges[k].height <= threshold) root[find(rb)] = find(ra);
  }

  std::vector<int> labels(n, -1);
  std::vector<int> label_of_root(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (label_of_root[r] < 0) label_of_root[r] = next++;
    labels[i] = label_of_root[r];
  }
  return labels;
}

std::vector<int> cluster_minima(std::span<const std::pair<int, double>> minima,
                                const ClusterOptions& options) {
  if (minima.empty()) throw Error(ErrorCode::NoMinima, "the cycle profile has no local minimum");
  const int n = static_cast<int>(minima.size());
  std::vector<int> all;
  for (const auto& m : minima) all.push_back(m.first);
  std::sort(all.begin(), all.end());
  if (n == 1) return all;

  std::vector<double> values;
  for (const auto& m : minima) values.push_back(m.second);

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> gaps;
  for (int k = 1; k < n; ++k) gaps.push_back(sorted[k] - sorted[k - 1]);
  std::sort(gaps.begin(), gaps.end());
  const double median_gap = gaps[(gaps.size() - 1) / 2];  // lower median
  // Repeats of the template sit at the noise floor and scatter in proportion
  // to it, so values within relative_floor x the lowest value always chain.
  // The range term keeps round-off between exact repeats from splitting.
  const double range = sorted.back() - sorted.front();
  const double threshold = std::max({options.gap_multiplier * median_gap,
                                     options.relative_floor * sorted.front(), 1e-6 * range});

  const auto labels = cut_dendrogram(single_linkage(values), n, threshold);
  const int clusters = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<double> sum(clusters, 0.0);
  std::vector<int> count(clusters, 0);
  for (int i = 0; i < n; ++i) {
    sum[labels[i]] += values[i];
    ++count[labels[i]];
  }

  int chosen = -1;
  for (int c = 0; c < clusters; ++c) {
    if (count[c] < 2) continue;
    if (chosen < 0 || sum[c] / count[c] < sum[chosen] / count[chosen]) chosen = c;
  }
  if (chosen < 0) return all;

  std::vector<int> selected;
  for (int i = 0; i < n; ++i) {
    if (labels[i] == chosen) selected.push_back(minima[i].first);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

double estimate_period(std::span<const int> selected_indices) {
  if (selected_indices.empty()) throw Error(ErrorCode::EmptyList, "no minima to estimate a period");
  std::vector<int> sorted(selected_indices.begin(), selected_indices.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() == 1) return static_cast<double>(sorted.front());
  double total = 0.0;
  for (std::size_t k = 1; k < sorted.size(); ++k) total += sorted[k] - sorted[k - 1];
  return total / static_cast<double>(sorted.size() - 1);
}

CycleSegmentation segment_cycles(int sequence_length, double period) {
  const long length = std::lround(period);
  if (!(period > 0.0) || length < 1)
    throw Error(ErrorCode::TooFewCycles, "period must be positive");
  if (sequence_length < 2 * length) {
    throw Error(ErrorCode::TooFewCycles, std::to_string(sequence_length) +
                                             " frames hold fewer than 2 cycles of " +
                                             std::to_string(length));
  }
  CycleSegmentation seg;
  seg.period = period;
  const long count = sequence_length / length;
  for (long c = 0; c < count; ++c) {
    seg.cycle_ranges.emplace_back(static_cast<int>(c * length),
                                  static_cast<int>((c + 1) * length - 1));
  }
  return seg;
}

int auto_template_length(int sequence_length) {
  if (sequence_length < 8)
    throw Error(ErrorCode::SequenceTooShort, "need at least 8 frames, got " + std::to_string(sequence_length));
  return std::max(2, sequence_length / 8);
}

namespace {

struct PeriodPass {
  CycleProfile profile;
  std::vector<int> minima;
  std::vector<int> selected;
  int exclusion = 0;
  double period = 0.0;
};

PeriodPass period_pass(std::span<const GramMatrix> seq, int template_length, const PeriodOptions& options) {
  PeriodPass pass;
  pass.profile = cycle_profile(seq, template_length);
  pass.exclusion = options.exclusion > 0 ? options.exclusion : std::max(1, template_length / 2);
  pass.minima = find_local_minima(pass.profile, pass.exclusion);

  std::vector<std::pair<int, double>> scored;
  for (int t : pass.minima) scored.emplace_back(t, pass.profile.values[t]);
  pass.selected = cluster_minima(scored, {options.gap_multiplier});
  pass.period = estimate_period(pass.selected);
  return pass;
}

constexpr int kMinRetryTemplate = 8;

// Every selected minimum of `coarse` lies near one of `fine`.
bool refines(const PeriodPass& fine, const PeriodPass& coarse) {
  const double tolerance = std::max(2.0, fine.period / 3.0);
  for (int t : coarse.selected) {
    const bool near = std::any_of(fine.selected.begin(), fine.selected.end(),
                                  [&](int u) { return std::abs(u - t) <= tolerance; });
    if (!near) return false;
  }
  return true;
}

}  // namespace

PeriodDetection detect_cycles(std::span<const GramMatrix> seq, const PeriodOptions& options) {
  const int n = static_cast<int>(seq.size());
  PeriodPass pass;
  if (options.template_length > 0) {
    pass = period_pass(seq, options.template_length, options);
  } else {
    // When the default template spans several repeats its exclusion radius
    // can swallow some of them, and the gaps between the survivors are
    // multiples of the period. A shorter template then finds a clearly
    // shorter period whose minima include the earlier ones.
    pass = period_pass(seq, auto_template_length(n), options);
    for (int shorter = pass.profile.template_length / 4; shorter >= kMinRetryTemplate; shorter /= 4) {
      PeriodPass candidate;
      try {
        candidate = period_pass(seq, shorter, options);
      } catch (const Error&) {
        continue;
      }
      if (candidate.period <= pass.period / 1.5 && refines(candidate, pass)) pass = std::move(candidate);
    }
  }

  PeriodDetection det;
  det.profile = std::move(pass.profile);
  det.minima = std::move(pass.minima);
  det.exclusion = pass.exclusion;
  det.segmentation = segment_cycles(n, pass.period);
  det.segmentation.minima_used = std::move(pass.selected);
  return det;
}

}  // namespace cyclestat
