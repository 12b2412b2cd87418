#pragma once

#include "cyclestat/manifold.hpp"
#include "cyclestat/skeleton.hpp"

#include <Eigen/Core>
#include <Eigen/QR>

#include <cmath>
#include <random>

namespace cyclestat::test {

inline Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                                double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = n(rng);
  return m;
}

/// Haar-ish random orthogonal matrix from a QR factorization.
inline Eigen::MatrixXd random_orthogonal(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(rng, n, n));
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

inline Eigen::Matrix2d rotation2d(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

/// Rank <= 2 Gram of a random 25 x 2 point cloud.
inline GramMatrix random_gram(std::mt19937_64& rng, Eigen::Index n = 25, Eigen::Index d = 2) {
  return GramMatrix::from_factor(gaussian(rng, n, d), static_cast<int>(d));
}

/// A random BODY_25 pose with full confidence, in pixel-like units.
inline SkeletonPose random_pose(std::mt19937_64& rng, int dims = 2) {
  SkeletonPose pose;
  pose.coords = gaussian(rng, 25, dims, 50.0);
  pose.coords.rowwise() += Eigen::RowVectorXd::Constant(dims, 300.0);
  pose.confidence = Eigen::VectorXd::Constant(25, 0.8);
  return pose;
}

}  // namespace cyclestat::test
