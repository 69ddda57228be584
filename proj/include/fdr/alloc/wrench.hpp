#pragma once

#include <Eigen/Core>

namespace fdr {

// Body-frame force (N) and torque (N*m), stacked as [fx fy fz tx ty tz].
struct Wrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();

  Eigen::Matrix<double, 6, 1> vec() const {
    Eigen::Matrix<double, 6, 1> w;
    w << force, torque;
    return w;
  }

  static Wrench from_vec(const Eigen::Matrix<double, 6, 1>& w) {
    return Wrench{w.head<3>(), w.tail<3>()};
  }

  bool finite() const { return force.allFinite() && torque.allFinite(); }

  Wrench& operator+=(const Wrench& o) {
    force += o.force;
    torque += o.torque;
    return *this;
  }
};

inline Wrench operator+(Wrench a, const Wrench& b) { return a += b; }

inline Wrench operator-(const Wrench& a, const Wrench& b) {
  return Wrench{a.force - b.force, a.torque - b.torque};
}

}  // namespace fdr
