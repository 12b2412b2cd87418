#include "cyclestat/synth.hpp"

#include "cyclestat/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

namespace cyclestat {

void SynthConfig::validate() const {
  if (period < 8) throw Error(ErrorCode::InvalidConfig, "period must be >= 8 frames");
  if (num_cycles < 2) throw Error(ErrorCode::InvalidConfig, "need at least 2 cycles");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw Error(ErrorCode::InvalidConfig, "noise must be finite and >= 0");
  if (phase_jitter < 0 || 4 * phase_jitter >= period)
    throw Error(ErrorCode::InvalidConfig, "phase jitter must lie in [0, period / 4)");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw Error(ErrorCode::InvalidConfig, "amplitude must be finite and >= 0");
}

namespace {

constexpr double kTorsoPixels = 160.0;
constexpr double kCenterX = 640.0;
constexpr double kCenterY = 400.0;

using Vec2 = Eigen::Vector2d;

Vec2 limb(double angle_from_down, double side) {
  return {side * std::sin(angle_from_down), -std::cos(angle_from_down)};
}

Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

// Figure in torso units, y up, mid-hip at the origin. `phase` in radians.
Eigen::Matrix<double, 25, 2> figure_at(double phase, double amplitude) {
  const double raise = 0.2 + amplitude * 2.3 * 0.5 * (1.0 - std::cos(phase));
  const double raise_left = 0.2 + amplitude * 2.3 * 0.5 * (1.0 - std::cos(phase - 0.25));
  const double elbow = amplitude * 0.5 * 0.5 * (1.0 + std::sin(phase));
  const double spread = 0.06 + amplitude * 0.35 * 0.5 * (1.0 - std::cos(phase));
  const double knee = amplitude * 0.3 * 0.5 * (1.0 - std::cos(2.0 * phase));
  const double tilt = amplitude * 0.12 * std::sin(phase);
  const Vec2 bounce{0.0, amplitude * 0.08 * 0.5 * (1.0 - std::cos(2.0 * phase))};

  Eigen::Matrix<double, 25, 2> p;
  auto set = [&](int j, const Vec2& v) { p.row(j) = (v + bounce).transpose(); };

  const Vec2 neck{0.0, 1.0};
  const Vec2 r_shoulder{-0.38, 0.97}, l_shoulder{0.38, 0.97};
  const Vec2 r_elbow = r_shoulder + 0.55 * limb(raise, -1.0);
  const Vec2 l_elbow = l_shoulder + 0.55 * limb(raise_left, 1.0);
  const Vec2 r_wrist = r_elbow + 0.5 * limb(raise + elbow, -1.0);
  const Vec2 l_wrist = l_elbow + 0.5 * limb(raise_left + elbow, 1.0);
  const Vec2 r_hip{-0.16, 0.0}, l_hip{0.16, 0.0};
  const Vec2 r_knee = r_hip + 0.62 * limb(spread, -1.0);
  const Vec2 l_knee = l_hip + 0.62 * limb(spread, 1.0);
  const Vec2 r_ankle = r_knee + 0.58 * limb(spread - knee, -1.0);
  const Vec2 l_ankle = l_knee + 0.58 * limb(spread - knee, 1.0);

  set(0, neck + rotate({0.0, 0.3}, tilt));
  set(1, neck);
  set(2, r_shoulder);
  set(3, r_elbow);
  set(4, r_wrist);
  set(5, l_shoulder);
  set(6, l_elbow);
  set(7, l_wrist);
  set(8, Vec2{0.0, 0.0});
  set(9, r_hip);
  set(10, r_knee);
  set(11, r_ankle);
  set(12, l_hip);
  set(13, l_knee);
  set(14, l_ankle);
  set(15, neck + rotate({-0.06, 0.36}, tilt));
  set(16, neck + rotate({0.06, 0.36}, tilt));
  set(17, neck + rotate({-0.13, 0.33}, tilt));
  set(18, neck + rotate({0.13, 0.33}, tilt));
  set(19, l_ankle + Vec2{0.14, -0.10});
  set(20, l_ankle + Vec2{0.20, -0.08});
  set(21, l_ankle + Vec2{-0.03, -0.08});
  set(22, r_ankle + Vec2{-0.14, -0.10});
  set(23, r_ankle + Vec2{-0.20, -0.08});
  set(24, r_ankle + Vec2{0.03, -0.08});
  return p;
}

}  // namespace

PoseSequence generate_cyclic_sequence(const SynthConfig& cfg, const SkeletonModel& model) {
  cfg.validate();
  model.validate();
  if (model.joint_count != 25 || model.neck_index != 1 || model.midhip_index != 8)
    throw Error(ErrorCode::InvalidConfig, "the generator articulates the BODY_25 topology");

  std::mt19937_64 rng(cfg.seed);
  std::vector<int> shift(static_cast<std::size_t>(cfg.num_cycles), 0);
  if (cfg.phase_jitter > 0) {
    std::uniform_int_distribution<int> jitter(-cfg.phase_jitter, cfg.phase_jitter);
    for (int& s : shift) s = jitter(rng);
  }
  std::normal_distribution<double> noise(0.0, 1.0);
  const double noise_pixels = cfg.noise_sigma * kTorsoPixels;

  PoseSequence seq;
  seq.model = model;
  const int frames = cfg.period * cfg.num_cycles;
  seq.poses.reserve(static_cast<std::size_t>(frames));
  for (int k = 0; k < frames; ++k) {
    const int cycle = k / cfg.period;
    // Phase from the within-cycle offset keeps noiseless cycles bit-identical.
    const int offset = k % cfg.period + shift[static_cast<std::size_t>(cycle)];
    const double phase = 2.0 * std::numbers::pi * offset / cfg.period;
    const auto body = figure_at(phase, cfg.amplitude);

    SkeletonPose pose;
    pose.frame_index = k;
    pose.coords.resize(25, 2);
    pose.confidence = Eigen::VectorXd::Constant(25, 0.9);
    for (int j = 0; j < 25; ++j) {
      pose.coords(j, 0) = kCenterX + kTorsoPixels * body(j, 0);
      pose.coords(j, 1) = kCenterY - kTorsoPixels * body(j, 1);
      if (noise_pixels > 0.0) {
        pose.coords(j, 0) += noise_pixels * noise(rng);
        pose.coords(j, 1) += noise_pixels * noise(rng);
      }
    }
    seq.poses.push_back(std::move(pose));
  }
  return seq;
}

double brute_force_dtw(const Eigen::MatrixXd& local_costs) {
  const int la = static_cast<int>(local_costs.rows());
  const int lb = static_cast<int>(local_costs.cols());
  if (la == 0 || lb == 0) throw Error(ErrorCode::EmptySequence, "oracle needs non-empty sequences");
  if (la > 8 || lb > 8) throw Error(ErrorCode::TooLongForOracle, "oracle is limited to 8 x 8");

  double best = std::numeric_limits<double>::infinity();
  // Depth-first walk over every path; the running sum grows in path order.
  std::function<void(int, int, double)> walk = [&](int i, int j, double sum) {
    if (i == la - 1 && j == lb - 1) {
      best = std::min(best, sum);
      return;
    }
    if (i + 1 < la && j + 1 < lb) walk(i + 1, j + 1, sum + local_costs(i + 1, j + 1));
    if (j + 1 < lb) walk(i, j + 1, sum + local_costs(i, j + 1));
    if (i + 1 < la) walk(i + 1, j, sum + local_costs(i + 1, j));
  };
  walk(0, 0, local_costs(0, 0));
  return best;
}

double commuting_distance_oracle(std::span<const double> eigs_i, std::span<const double> eigs_j) {
  if (eigs_i.size() != eigs_j.size())
    throw Error(ErrorCode::LengthMismatch, "eigenvalue lists differ in length");
  double sum = 0.0;
  for (std::size_t k = 0; k < eigs_i.size(); ++k) {
    const double d = std::sqrt(eigs_i[k]) - std::sqrt(eigs_j[k]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace cyclestat
