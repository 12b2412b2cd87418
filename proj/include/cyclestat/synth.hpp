#pragma once

// Synthetic cyclic skeleton sequences with known ground truth, and the
// brute-force oracles the test suites check the main modules against.

#include "cyclestat/skeleton.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>

namespace cyclestat {

struct SynthConfig {
  int period = 40;
  int num_cycles = 4;
  double noise_sigma = 0.0;  // fraction of torso length
  int phase_jitter = 0;      // max per-cycle phase shift, frames
  double amplitude = 1.0;
  std::uint64_t seed = 0;

  /// Throws InvalidConfig.
  void validate() const;
};

/// Jumping-jack style articulation on the BODY_25 topology, in pixel
/// coordinates (y pointing down). Deterministic for a given config.
PoseSequence generate_cyclic_sequence(const SynthConfig& cfg,
                                      const SkeletonModel& model = SkeletonModel::body25());

/// Minimum cumulative cost over every monotone boundary-to-boundary path of
/// steps (1,0), (0,1), (1,1), by exhaustive enumeration. Both sides <= 8.
double brute_force_dtw(const Eigen::MatrixXd& local_costs);

/// sqrt(sum_k (sqrt(l_k) - sqrt(m_k))^2) for two simultaneously diagonal PSD
/// matrices given by eigenvalues in a shared basis order.
double commuting_distance_oracle(std::span<const double> eigs_i, std::span<const double> eigs_j);

}  // namespace cyclestat
