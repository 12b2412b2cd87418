#include "cyclestat/manifold.hpp"

#include "cyclestat/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace cyclestat {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen_symmetric(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::EigenFailure, "symmetric eigendecomposition did not converge");
  return solver;
}

}  // namespace

GramMatrix GramMatrix::from_factor(Eigen::MatrixXd factor, int rank_bound) {
  GramMatrix g;
  g.entries_ = factor * factor.transpose();
  g.factor_ = std::move(factor);
  g.rank_bound_ = rank_bound;
  return g;
}

GramMatrix GramMatrix::from_entries(const Eigen::MatrixXd& entries, int rank_bound) {
  if (entries.rows() != entries.cols()) throw Error(ErrorCode::InvalidGram, "matrix is not square");
  if (entries.size() > 0 && (entries - entries.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw Error(ErrorCode::InvalidGram, "matrix is not symmetric");

  const Eigen::MatrixXd sym = 0.5 * (entries + entries.transpose());
  GramMatrix g;
  g.entries_ = sym;
  g.rank_bound_ = rank_bound;
  if (sym.size() == 0) return g;

  const auto solver = eigen_symmetric(sym);
  const Eigen::VectorXd& lambda = solver.eigenvalues();  // ascending
  if (lambda.minCoeff() < -1e-9) throw Error(ErrorCode::InvalidGram, "matrix is not PSD");
  const double largest = lambda.maxCoeff();
  const auto rank = (lambda.array() > 1e-9 * largest).count();
  if (largest > 0.0 && rank > rank_bound)
    throw Error(ErrorCode::InvalidGram, "rank " + std::to_string(rank) + " exceeds bound " +
                                            std::to_string(rank_bound));

  // Factor from the leading rank_bound eigenpairs; the rest is round-off.
  const Eigen::Index n = sym.rows();
  Eigen::Index keep = 0;
  for (Eigen::Index k = n - 1; k >= 0 && keep < rank_bound && lambda(k) > 0.0; --k) ++keep;
  g.factor_.resize(n, keep);
  for (Eigen::Index c = 0; c < keep; ++c)
    g.factor_.col(c) = solver.eigenvectors().col(n - 1 - c) * std::sqrt(lambda(n - 1 - c));
  return g;
}

GramMatrix gram_of(const SkeletonPose& pose) {
  return GramMatrix::from_factor(mean_center(pose).coords, pose.dims());
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& g) {
  if (g.size() == 0) return g;
  const auto solver = eigen_symmetric(0.5 * (g + g.transpose()));
  const Eigen::VectorXd root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd& v = solver.eigenvectors();
  return v * root.asDiagonal() * v.transpose();
}

Eigen::MatrixXd pad_columns(const Eigen::MatrixXd& m, Eigen::Index cols) {
  if (m.cols() >= cols) return m;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), cols);
  out.leftCols(m.cols()) = m;
  return out;
}

Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd k = b.transpose() * a;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double geodesic_distance(const GramMatrix& gi, const GramMatrix& gj) {
  if (gi.size() != gj.size()) {
    throw Error(ErrorCode::DimensionMismatch, "Gram sizes " + std::to_string(gi.size()) + " and " +
                                                  std::to_string(gj.size()));
  }
  const Eigen::Index width = std::max(gi.factor().cols(), gj.factor().cols());
  if (width == 0 || gi.size() == 0) return 0.0;
  const Eigen::MatrixXd a = pad_columns(gi.factor(), width);
  const Eigen::MatrixXd b = pad_columns(gj.factor(), width);
  return (a - b * procrustes_rotation(a, b)).norm();
}

double geodesic_distance_trace_form(const Eigen::MatrixXd& gi, const Eigen::MatrixXd& gj) {
  if (gi.rows() != gj.rows())
    throw Error(ErrorCode::DimensionMismatch, "Gram sizes differ");
  if (gi.size() == 0) return 0.0;
  const Eigen::MatrixXd si = psd_sqrt(gi);
  const Eigen::MatrixXd inner = si * gj * si;
  const auto solver = eigen_symmetric(0.5 * (inner + inner.transpose()));
  const double cross = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double bracket = gi.trace() + gj.trace() - 2.0 * cross;
  return std::sqrt(std::max(bracket, 0.0));
}

}  // namespace cyclestat
