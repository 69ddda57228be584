#pragma once

// Test-only reference implementations. Deliberately routed through different
// decompositions than the library (complete orthogonal decomposition and LU
// kernels instead of Jacobi SVD) so agreement is meaningful.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

// Ordinary least squares over stacked regressor rows.
inline Eigen::VectorXd batch_least_squares(const Eigen::MatrixXd& Phi,
                                           const Eigen::VectorXd& y) {
  return Phi.colPivHouseholderQr().solve(y);
}

struct AllocOpt {
  bool feasible = false;
  double cost = std::numeric_limits<double>::infinity();
  Eigen::VectorXd d;  // deviation from trim
};

namespace detail {

inline Eigen::MatrixXd orthonormal_kernel(const Eigen::MatrixXd& M) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  const Eigen::MatrixXd K = lu.kernel();
  if (lu.dimensionOfKernel() == 0) return Eigen::MatrixXd(M.cols(), 0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(K);
  Eigen::MatrixXd Q = qr.householderQ();
  return Q.leftCols(K.cols());
}

inline bool box_ok(const Eigen::VectorXd& d, const Eigen::VectorXd& lo,
                   const Eigen::VectorXd& hi, double tol) {
  return ((d.array() >= lo.array() - tol) && (d.array() <= hi.array() + tol)).all();
}

}  // namespace detail

// Global optimum of
//   min d'Rd  s.t.  d in uln + range(N),  lo <= d <= hi
// by enumerating every candidate active set of bound constraints (size up to
// the null-space dimension) and solving the equality-constrained problem for
// each. Exhaustive and exact for the small instances used in tests.
inline AllocOpt allocation_optimum(const Eigen::MatrixXd& B, const Eigen::VectorXd& dw,
                                   const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                   const Eigen::VectorXd& weights) {
  const Eigen::Index n = B.cols();
  const Eigen::MatrixXd R = weights.asDiagonal();
  const Eigen::VectorXd uln =
      B.completeOrthogonalDecomposition().pseudoInverse() * dw;
  const Eigen::MatrixXd N = detail::orthonormal_kernel(B);
  const Eigen::Index k = N.cols();

  AllocOpt best;
  auto consider = [&](const Eigen::VectorXd& d) {
    if (!detail::box_ok(d, lo, hi, 1e-9)) return;
    const double c = d.dot(R * d);
    if (c < best.cost) {
      best.feasible = true;
      best.cost = c;
      best.d = d;
    }
  };

  if (k == 0) {
    consider(uln);
    return best;
  }

  const Eigen::MatrixXd NtRN = N.transpose() * R * N;

  // active sets are (actuator, side) picks; side +1 pins the upper bound
  std::vector<int> pick(static_cast<size_t>(k), 0);
  auto solve_subset = [&](const std::vector<std::pair<int, int>>& subset) {
    const Eigen::Index s = static_cast<Eigen::Index>(subset.size());
    Eigen::VectorXd lambda;
    if (s == 0) {
      lambda = NtRN.ldlt().solve(-N.transpose() * (R * uln));
    } else {
      Eigen::MatrixXd C(s, k);
      Eigen::VectorXd e(s);
      for (Eigen::Index r = 0; r < s; ++r) {
        const auto [i, side] = subset[static_cast<size_t>(r)];
        C.row(r) = N.row(i);
        e(r) = (side > 0 ? hi(i) : lo(i)) - uln(i);
      }
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(C);
      if (cod.rank() < s) return;  // dependent pins; a smaller subset covers it
      const Eigen::VectorXd lp = cod.pseudoInverse() * e;
      const Eigen::MatrixXd Z = detail::orthonormal_kernel(C);
      if (Z.cols() == 0) {
        lambda = lp;
      } else {
        const Eigen::MatrixXd Hm = Z.transpose() * NtRN * Z;
        const Eigen::VectorXd gm =
            Z.transpose() * (NtRN * lp + N.transpose() * (R * uln));
        lambda = lp + Z * Hm.ldlt().solve(-gm);
      }
    }
    consider(uln + N * lambda);
  };

  std::vector<std::pair<int, int>> subset;
  // enumerate subsets of {0..n-1} of size <= k with a side per member
  std::function<void(int, Eigen::Index)> rec = [&](int start, Eigen::Index depth) {
    solve_subset(subset);
    if (depth == k) return;
    for (int i = start; i < n; ++i) {
      for (int side : {-1, +1}) {
        subset.emplace_back(i, side);
        rec(i + 1, depth + 1);
        subset.pop_back();
      }
    }
  };
  rec(0, 0);
  return best;
}

// The grid-refinement route over the null-space coefficients; coarser than
// the enumeration above, used to cross-check it.
inline AllocOpt allocation_grid(const Eigen::MatrixXd& B, const Eigen::VectorXd& dw,
                                const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                const Eigen::VectorXd& weights, int rounds = 8,
                                int pts = 15) {
  const Eigen::MatrixXd R = weights.asDiagonal();
  const Eigen::VectorXd uln =
      B.completeOrthogonalDecomposition().pseudoInverse() * dw;
  const Eigen::MatrixXd N = detail::orthonormal_kernel(B);
  const Eigen::Index k = N.cols();

  AllocOpt best;
  auto consider = [&](const Eigen::VectorXd& lambda) {
    const Eigen::VectorXd d = uln + N * lambda;
    if (!detail::box_ok(d, lo, hi, 1e-12)) return;
    const double c = d.dot(R * d);
    if (c < best.cost) {
      best.feasible = true;
      best.cost = c;
      best.d = d;
    }
  };

  if (k == 0) {
    consider(Eigen::VectorXd(0));
    return best;
  }

  // ||lambda|| == ||N lambda|| <= radius of the shifted box
  double radius = 0.0;
  for (Eigen::Index i = 0; i < B.cols(); ++i) {
    const double m = std::max(std::abs(lo(i) - uln(i)), std::abs(hi(i) - uln(i)));
    radius += m * m;
  }
  radius = std::sqrt(radius);

  Eigen::VectorXd center = Eigen::VectorXd::Zero(k);
  double half = radius;
  for (int round = 0; round < rounds; ++round) {
    std::vector<int> idx(static_cast<size_t>(k), 0);
    while (true) {
      Eigen::VectorXd lambda(k);
      for (Eigen::Index a = 0; a < k; ++a)
        lambda(a) = center(a) + half * (2.0 * idx[static_cast<size_t>(a)] / (pts - 1) - 1.0);
      consider(lambda);
      Eigen::Index c = 0;
      while (c < k && ++idx[static_cast<size_t>(c)] == pts) {
        idx[static_cast<size_t>(c)] = 0;
        ++c;
      }
      if (c == k) break;
    }
    if (best.feasible) {
      // recenter on the best feasible point found so far
      center = N.transpose() * (best.d - uln);
    }
    half *= 3.0 / (pts - 1);
  }
  return best;
}

}  // namespace oracle
