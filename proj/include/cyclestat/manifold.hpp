#pragma once

// Gram-matrix pose descriptors and the geodesic distance on the PSD cone.

#include "cyclestat/skeleton.hpp"

#include <Eigen/Core>

namespace cyclestat {

/// Symmetric PSD n x n matrix of rank at most `rank_bound`.
///
/// Besides the dense entries every GramMatrix keeps a factor F (n x r) with
/// F F^T equal to the entries. Grams built from poses use the centered joint
/// coordinates as the factor; Grams built from dense entries get one from a
/// clamped eigendecomposition truncated to the rank bound.
class GramMatrix {
 public:
  GramMatrix() = default;

  /// G = F F^T. The factor is kept as given.
  static GramMatrix from_factor(Eigen::MatrixXd factor, int rank_bound);

  /// Validates symmetry (1e-10), numerical PSD (eigenvalues >= -1e-9) and
  /// the rank bound (at most `rank_bound` eigenvalues above 1e-9 relative to
  /// the largest). Throws InvalidGram or EigenFailure.
  static GramMatrix from_entries(const Eigen::MatrixXd& entries, int rank_bound);

  const Eigen::MatrixXd& entries() const { return entries_; }
  const Eigen::MatrixXd& factor() const { return factor_; }
  int rank_bound() const { return rank_bound_; }
  int size() const { return static_cast<int>(entries_.rows()); }
  double trace() const { return entries_.trace(); }

 private:
  Eigen::MatrixXd entries_;
  Eigen::MatrixXd factor_;
  int rank_bound_ = 0;
};

/// Gram matrix of the mean-centered joint coordinates.
GramMatrix gram_of(const SkeletonPose& pose);

/// Symmetric square root via eigendecomposition, eigenvalues clamped at 0.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& g);
inline Eigen::MatrixXd psd_sqrt(const GramMatrix& g) { return psd_sqrt(g.entries()); }

/// delta(Gi, Gj) = sqrt(tr Gi + tr Gj - 2 tr((Gi^1/2 Gj Gi^1/2)^1/2)).
///
/// Evaluated on the factors as min_U ||Fi - Fj U||_F over orthogonal U (the
/// orthogonal Procrustes residual), which equals the trace expression but
/// does not cancel catastrophically when the two matrices are close.
double geodesic_distance(const GramMatrix& gi, const GramMatrix& gj);

/// Literal trace-form evaluation through two psd_sqrt calls. Slower and
/// less accurate near zero; kept as an independent cross-check.
double geodesic_distance_trace_form(const Eigen::MatrixXd& gi, const Eigen::MatrixXd& gj);

/// Orthogonal U minimizing ||a - b U||_F for equally wide a and b.
Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Right-pads `m` with zero columns up to `cols`.
Eigen::MatrixXd pad_columns(const Eigen::MatrixXd& m, Eigen::Index cols);

}  // namespace cyclestat
