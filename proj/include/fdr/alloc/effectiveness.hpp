#pragma once

#include <Eigen/Core>
#include <functional>
#include <stdexcept>

#include "fdr/alloc/wrench.hpp"

namespace fdr {

// 6 x n map from actuator deviation (about linearization_point) to body
// wrench deviation. Rows are [fx fy fz tx ty tz], columns follow the
// actuator layout order.
struct EffectivenessMatrix {
  Eigen::MatrixXd B;
  Eigen::VectorXd linearization_point;
};

using WrenchModel = std::function<Wrench(const Eigen::VectorXd&)>;

// Central finite differences of the wrench model, column per actuator.
// Exact on models linear in u; the default step keeps the truncation error
// of smooth trig terms below 1e-7 at flight scales.
inline EffectivenessMatrix linearize_effectiveness(const WrenchModel& model,
                                                   const Eigen::VectorXd& u_trim,
                                                   const Eigen::VectorXd& steps) {
  const Eigen::Index n = u_trim.size();
  if (steps.size() != n)
    throw std::invalid_argument("linearize_effectiveness: step size vector mismatch");
  if ((steps.array() <= 0.0).any())
    throw std::invalid_argument("linearize_effectiveness: steps must be positive");

  EffectivenessMatrix em;
  em.B.resize(6, n);
  em.linearization_point = u_trim;
  Eigen::VectorXd up = u_trim, dn = u_trim;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = steps(j);
    up(j) += h;
    dn(j) -= h;
    const Wrench wp = model(up);
    const Wrench wn = model(dn);
    if (!wp.finite() || !wn.finite())
      throw std::runtime_error("linearize_effectiveness: non-finite model evaluation");
    em.B.col(j) = (wp.vec() - wn.vec()) / (2.0 * h);
    up(j) = u_trim(j);
    dn(j) = u_trim(j);
  }
  return em;
}

inline EffectivenessMatrix linearize_effectiveness(const WrenchModel& model,
                                                   const Eigen::VectorXd& u_trim,
                                                   double step = 1e-4) {
  return linearize_effectiveness(model, u_trim,
                                 Eigen::VectorXd::Constant(u_trim.size(), step));
}

}  // namespace fdr
