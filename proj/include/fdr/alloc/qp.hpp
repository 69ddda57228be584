#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fdr {

enum class QpStatus { Optimal, Infeasible, IterationLimit };

struct QpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  // one per constraint row, zero when inactive
  std::vector<int> active;
  int iterations = 0;
  QpStatus status = QpStatus::Optimal;
  double kkt_residual = 0.0;
};

namespace detail {

inline double qp_kkt_residual(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                              const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const QpResult& res) {
  Eigen::VectorXd grad = H * res.x + g - A.transpose() * res.multipliers;
  double kkt = grad.lpNorm<Eigen::Infinity>();
  for (Eigen::Index j = 0; j < A.rows(); ++j) {
    const double s = A.row(j).dot(res.x) - b(j);
    kkt = std::max(kkt, std::max(0.0, -s));
    kkt = std::max(kkt, std::abs(res.multipliers(j) * s));
    kkt = std::max(kkt, -res.multipliers(j));
  }
  return kkt;
}

}  // namespace detail

// Minimize 1/2 x'Hx + g'x subject to A x >= b, with H symmetric positive
// definite. Dual active-set method: starts at the unconstrained minimizer and
// repeatedly activates the most violated constraint, taking primal/dual steps
// that keep the working-set multipliers nonnegative. Small problems only; the
// working-set systems are re-solved from scratch on every change.
inline QpResult solve_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                         const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                         int max_iterations = 0) {
  const Eigen::Index n = H.rows();
  const Eigen::Index m = A.rows();
  if (H.cols() != n || g.size() != n)
    throw std::invalid_argument("solve_qp: H/g dimension mismatch");
  if (m > 0 && A.cols() != n)
    throw std::invalid_argument("solve_qp: A column count does not match H");
  if (b.size() != m)
    throw std::invalid_argument("solve_qp: b size does not match A rows");

  Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("solve_qp: H is not positive definite");

  if (max_iterations <= 0) max_iterations = 100 * static_cast<int>(std::max<Eigen::Index>(1, n));
  const double inf = std::numeric_limits<double>::infinity();

  QpResult res;
  res.x = -llt.solve(g);
  res.multipliers = Eigen::VectorXd::Zero(m);

  std::vector<int> W;       // working set (constraint rows treated as active)
  std::vector<double> u;    // their multipliers
  int iters = 0;
  bool done = false;

  while (!done) {
    // most violated constraint outside the working set
    int p = -1;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (std::find(W.begin(), W.end(), static_cast<int>(j)) != W.end()) continue;
      const double s = A.row(j).dot(res.x) - b(j);
      const double tol = 1e-12 * (1.0 + std::abs(b(j)));
      if (s < -tol && s < worst) {
        worst = s;
        p = static_cast<int>(j);
      }
    }
    if (p < 0) {
      res.status = QpStatus::Optimal;
      break;
    }

    const Eigen::VectorXd ap = A.row(p).transpose();
    double up = 0.0;

    while (true) {
      if (++iters > max_iterations) {
        res.status = QpStatus::IterationLimit;
        done = true;
        break;
      }

      const Eigen::VectorXd hp = llt.solve(ap);
      const int q = static_cast<int>(W.size());
      Eigen::VectorXd z, r;
      Eigen::MatrixXd Y;
      if (q == 0) {
        z = hp;
        r.resize(0);
      } else {
        Eigen::MatrixXd AwT(n, q);
        for (int k = 0; k < q; ++k) AwT.col(k) = A.row(W[static_cast<size_t>(k)]).transpose();
        Y = llt.solve(AwT);
        const Eigen::MatrixXd M = AwT.transpose() * Y;  // Aw H^-1 Aw'
        r = M.ldlt().solve(AwT.transpose() * hp);
        z = hp - Y * r;
      }

      const double full_metric = ap.dot(hp);  // a_p' H^-1 a_p
      const double ztap = ap.dot(z);          // equals z'Hz >= 0
      const bool z_zero = !(ztap > 1e-14 * std::max(1.0, full_metric));

      const double sp = ap.dot(res.x) - b(p);
      const double t1 = z_zero ? inf : -sp / ztap;

      double t2 = inf;
      int block = -1;
      for (int k = 0; k < q; ++k) {
        if (r(k) > 1e-14) {
          const double cand = u[static_cast<size_t>(k)] / r(k);
          if (cand < t2) {
            t2 = cand;
            block = k;
          }
        }
      }

      const double t = std::min(t1, t2);
      if (!std::isfinite(t)) {
        res.status = QpStatus::Infeasible;
        done = true;
        break;
      }

      for (int k = 0; k < q; ++k) u[static_cast<size_t>(k)] -= t * r(k);
      up += t;
      if (!z_zero) res.x += t * z;

      if (block >= 0 && (z_zero || t2 < t1)) {
        W.erase(W.begin() + block);
        u.erase(u.begin() + block);
        continue;  // same candidate p against the reduced working set
      }
      W.push_back(p);
      u.push_back(up);
      break;
    }
  }

  for (size_t k = 0; k < W.size(); ++k)
    res.multipliers(W[k]) = std::max(0.0, u[k]);
  res.active = W;
  res.iterations = iters;
  res.kkt_residual = detail::qp_kkt_residual(H, g, A, b, res);
  return res;
}

}  // namespace fdr
