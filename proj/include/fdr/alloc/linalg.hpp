#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <stdexcept>

namespace fdr {

// Singular values below rank_rtol * sigma_max are treated as zero everywhere
// a rank decision is made.
inline constexpr double kRankRtol = 1e-9;

// Minimum-norm x with ||B x - w|| minimal, via SVD pseudo-inverse.
inline Eigen::VectorXd least_norm(const Eigen::MatrixXd& B, const Eigen::VectorXd& w) {
  if (w.size() != B.rows())
    throw std::invalid_argument("least_norm: rhs size does not match rows of B");
  if (!B.allFinite() || !w.allFinite())
    throw std::invalid_argument("least_norm: non-finite input");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double thresh = s.size() > 0 ? kRankRtol * s(0) : 0.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(B.cols());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > thresh)
      x += (svd.matrixU().col(i).dot(w) / s(i)) * svd.matrixV().col(i);
  }
  return x;
}

// Orthonormal basis of the null space of B, one column per null direction.
// Returns an n x 0 matrix when B has full column rank.
inline Eigen::MatrixXd null_basis(const Eigen::MatrixXd& B) {
  if (!B.allFinite())
    throw std::invalid_argument("null_basis: non-finite input");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double thresh = s.size() > 0 ? kRankRtol * s(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > thresh) ++rank;
  return svd.matrixV().rightCols(B.cols() - rank);
}

inline Eigen::Index numerical_rank(const Eigen::MatrixXd& B) {
  return B.cols() - null_basis(B).cols();
}

}  // namespace fdr
