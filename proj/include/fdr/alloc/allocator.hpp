#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fdr/alloc/layout.hpp"
#include "fdr/alloc/linalg.hpp"
#include "fdr/alloc/qp.hpp"
#include "fdr/alloc/wrench.hpp"

namespace fdr {

struct AllocationResult {
  Eigen::VectorXd u_sp;       // full-length setpoint, failed entries pinned
  Eigen::VectorXd lambda;     // null-space coefficients of the solved problem
  Eigen::VectorXd achieved;   // B * (u_sp - u_trim), one entry per wrench row
  double wrench_residual = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  bool fallback = false;      // feasible set was empty; result is clipped
  std::vector<int> saturated; // actuator indices sitting on a bound

  Wrench achieved_wrench() const {
    if (achieved.size() != 6)
      throw std::logic_error("achieved_wrench: wrench has non-6 dimension");
    return Wrench::from_vec(achieved);
  }
};

// Allocation problem with the failed columns removed and their frozen wrench
// contribution folded into the target.
struct ReducedProblem {
  Eigen::MatrixXd B;
  Eigen::VectorXd dw;
  ActuatorLayout layout;
  std::vector<int> kept;      // reduced column j -> original actuator index
  Eigen::VectorXd u_forced;   // full length; NaN for healthy actuators
};

inline ReducedProblem reconfigure_for_failure(const Eigen::MatrixXd& B,
                                              const Eigen::VectorXd& dw,
                                              const ActuatorLayout& layout,
                                              const FailureSet& failures) {
  const int n = static_cast<int>(B.cols());
  if (layout.size() != n)
    throw std::invalid_argument("reconfigure_for_failure: layout/B size mismatch");
  failures.validate(layout);

  ReducedProblem red;
  red.dw = dw;
  red.u_forced = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  for (const auto& f : failures.entries) {
    const double forced = failures.forced_value(f, layout);
    red.u_forced[f.actuator] = forced;
    red.dw -= B.col(f.actuator) * (forced - layout.u_trim[f.actuator]);
  }

  for (int i = 0; i < n; ++i)
    if (!failures.contains(i)) red.kept.push_back(i);
  if (red.kept.empty())
    throw std::runtime_error("reconfigure_for_failure: all actuators failed");

  const int nk = static_cast<int>(red.kept.size());
  red.B.resize(B.rows(), nk);
  red.layout.u_min.resize(nk);
  red.layout.u_max.resize(nk);
  red.layout.u_trim.resize(nk);
  red.layout.rate_limit.resize(nk);
  red.layout.zero_effect.resize(nk);
  for (int j = 0; j < nk; ++j) {
    const int i = red.kept[static_cast<size_t>(j)];
    red.B.col(j) = B.col(i);
    red.layout.names.push_back(layout.names[static_cast<size_t>(i)]);
    red.layout.u_min[j] = layout.u_min[i];
    red.layout.u_max[j] = layout.u_max[i];
    red.layout.u_trim[j] = layout.u_trim[i];
    red.layout.rate_limit[j] = layout.rate_limit[i];
    red.layout.zero_effect[j] = layout.zero_effect[i];
  }
  return red;
}

// Expand a reduced solution back to full length, failed entries pinned.
inline Eigen::VectorXd reinflate(const ReducedProblem& red, const Eigen::VectorXd& u_red) {
  if (u_red.size() != static_cast<Eigen::Index>(red.kept.size()))
    throw std::invalid_argument("reinflate: reduced solution size mismatch");
  Eigen::VectorXd u = red.u_forced;
  for (size_t j = 0; j < red.kept.size(); ++j) u[red.kept[j]] = u_red(j);
  return u;
}

namespace detail {

// Box-constrained least-deviation allocation with no pinned coordinates:
//   min (u - trim)' R (u - trim)  s.t.  B (u - trim) = B u_ln,  lo <= u <= hi
// solved as an active-set QP over the null-space coefficients.
inline AllocationResult allocate_box_core(const Eigen::MatrixXd& B,
                                          const Eigen::VectorXd& dw,
                                          const Eigen::VectorXd& lo,
                                          const Eigen::VectorXd& hi,
                                          const Eigen::VectorXd& trim,
                                          const Eigen::VectorXd& weights) {
  const Eigen::Index n = B.cols();
  AllocationResult res;

  const Eigen::VectorXd u_ln = least_norm(B, dw);
  const Eigen::MatrixXd N = null_basis(B);
  const Eigen::Index k = N.cols();
  const Eigen::VectorXd dlo = lo - trim;
  const Eigen::VectorXd dhi = hi - trim;

  Eigen::VectorXd d;
  if (k == 0) {
    res.lambda.resize(0);
    d = u_ln;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (d(i) < dlo(i) - 1e-12 || d(i) > dhi(i) + 1e-12) res.fallback = true;
    }
  } else {
    const Eigen::MatrixXd R = weights.asDiagonal();
    const Eigen::MatrixXd H = 2.0 * N.transpose() * R * N;
    const Eigen::VectorXd g = 2.0 * N.transpose() * (R * u_ln);
    // box on d = u_ln + N*lambda, split into lower and upper half-spaces
    Eigen::MatrixXd A(2 * n, k);
    Eigen::VectorXd b(2 * n);
    A.topRows(n) = N;
    A.bottomRows(n) = -N;
    b.head(n) = dlo - u_ln;
    b.tail(n) = u_ln - dhi;
    const QpResult qp = solve_qp(H, g, A, b, 100 * static_cast<int>(k));
    res.iterations = qp.iterations;
    res.kkt_residual = qp.kkt_residual;
    if (qp.status == QpStatus::Optimal) {
      res.lambda = qp.x;
      d = u_ln + N * qp.x;
    } else {
      res.fallback = true;
      res.lambda = Eigen::VectorXd::Zero(k);
      d = u_ln;
    }
  }
  d = d.cwiseMax(dlo).cwiseMin(dhi);  // exact box membership (clips the fallback)

  res.u_sp = trim + d;
  res.achieved = B * d;
  res.wrench_residual = (res.achieved - dw).norm();
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(res.u_sp(i) - lo(i)) <= 1e-9 || std::abs(res.u_sp(i) - hi(i)) <= 1e-9)
      res.saturated.push_back(static_cast<int>(i));
  return res;
}

// Handles degenerate box entries (lo == hi): those coordinates are frozen and
// eliminated before the null-space QP so the constraint set stays full rank.
inline AllocationResult allocate_box(const Eigen::MatrixXd& B, const Eigen::VectorXd& dw,
                                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                     const Eigen::VectorXd& trim,
                                     const Eigen::VectorXd& weights) {
  const Eigen::Index n = B.cols();
  if (lo.size() != n || hi.size() != n || trim.size() != n || weights.size() != n)
    throw std::invalid_argument("allocate: box/trim/weight size mismatch");
  if ((weights.array() <= 0.0).any())
    throw std::invalid_argument("allocate: weights must be positive");
  if (dw.size() != B.rows())
    throw std::invalid_argument("allocate: wrench size does not match B rows");

  std::vector<Eigen::Index> free_idx, pin_idx;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (hi(i) - lo(i) <= 1e-12)
      pin_idx.push_back(i);
    else
      free_idx.push_back(i);
  }
  if (pin_idx.empty()) return allocate_box_core(B, dw, lo, hi, trim, weights);

  const Eigen::Index nf = static_cast<Eigen::Index>(free_idx.size());
  Eigen::VectorXd dwf = dw;
  for (const auto i : pin_idx) dwf -= B.col(i) * (lo(i) - trim(i));

  AllocationResult res;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  if (nf == 0) {
    res.lambda.resize(0);
    res.fallback = true;
  } else {
    Eigen::MatrixXd Bf(B.rows(), nf);
    Eigen::VectorXd lof(nf), hif(nf), trimf(nf), wf(nf);
    for (Eigen::Index j = 0; j < nf; ++j) {
      const auto i = free_idx[static_cast<size_t>(j)];
      Bf.col(j) = B.col(i);
      lof(j) = lo(i);
      hif(j) = hi(i);
      trimf(j) = trim(i);
      wf(j) = weights(i);
    }
    const AllocationResult sub = allocate_box_core(Bf, dwf, lof, hif, trimf, wf);
    res.lambda = sub.lambda;
    res.iterations = sub.iterations;
    res.kkt_residual = sub.kkt_residual;
    res.fallback = sub.fallback;
    for (Eigen::Index j = 0; j < nf; ++j) u(free_idx[static_cast<size_t>(j)]) = sub.u_sp(j);
  }
  for (const auto i : pin_idx) u(i) = lo(i);

  res.u_sp = u;
  res.achieved = B * (u - trim);
  res.wrench_residual = (res.achieved - dw).norm();
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(u(i) - lo(i)) <= 1e-9 || std::abs(u(i) - hi(i)) <= 1e-9)
      res.saturated.push_back(static_cast<int>(i));
  return res;
}

}  // namespace detail

// Null-space allocation about the trim point under the layout's box limits.
inline AllocationResult solve_allocation(const Eigen::MatrixXd& B, const Eigen::VectorXd& dw,
                                         const ActuatorLayout& layout,
                                         const Eigen::VectorXd& weights) {
  layout.validate();
  return detail::allocate_box(B, dw, layout.u_min, layout.u_max, layout.u_trim, weights);
}

// Full pipeline: drop failed actuators, shrink the box by per-step rate
// limits around the previous setpoint, solve the reduced problem, reinflate.
inline AllocationResult allocate(const Eigen::MatrixXd& B, const Eigen::VectorXd& dw,
                                 const ActuatorLayout& layout, const Eigen::VectorXd& weights,
                                 const FailureSet& failures,
                                 const Eigen::VectorXd* u_prev = nullptr, double dt = 0.0) {
  layout.validate();
  const int n = layout.size();
  if (weights.size() != n)
    throw std::invalid_argument("allocate: weight vector size mismatch");

  Eigen::VectorXd lo = layout.u_min;
  Eigen::VectorXd hi = layout.u_max;
  if (u_prev != nullptr && dt > 0.0) {
    if (u_prev->size() != n)
      throw std::invalid_argument("allocate: u_prev size mismatch");
    for (int i = 0; i < n; ++i) {
      const double step = layout.rate_limit[i] * dt;
      lo(i) = std::max(lo(i), (*u_prev)(i) - step);
      hi(i) = std::min(hi(i), (*u_prev)(i) + step);
      if (lo(i) > hi(i)) {
        // previous setpoint outside the physical box; pin to its projection
        lo(i) = hi(i) = std::clamp((*u_prev)(i), layout.u_min[i], layout.u_max[i]);
      }
    }
  }

  const ReducedProblem red = reconfigure_for_failure(B, dw, layout, failures);
  const int nk = static_cast<int>(red.kept.size());
  Eigen::VectorXd lor(nk), hir(nk), wr(nk);
  for (int j = 0; j < nk; ++j) {
    const int i = red.kept[static_cast<size_t>(j)];
    lor(j) = lo(i);
    hir(j) = hi(i);
    wr(j) = weights(i);
  }

  const AllocationResult sub =
      detail::allocate_box(red.B, red.dw, lor, hir, red.layout.u_trim, wr);

  AllocationResult res;
  res.u_sp = reinflate(red, sub.u_sp);
  res.lambda = sub.lambda;
  res.iterations = sub.iterations;
  res.kkt_residual = sub.kkt_residual;
  res.fallback = sub.fallback;
  res.achieved = B * (res.u_sp - layout.u_trim);
  res.wrench_residual = (res.achieved - dw).norm();
  for (const int j : sub.saturated) res.saturated.push_back(red.kept[static_cast<size_t>(j)]);
  return res;
}

}  // namespace fdr
