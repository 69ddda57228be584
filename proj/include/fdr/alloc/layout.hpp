#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdr {

// Actuator set of one vehicle configuration: names, command limits, trim
// setpoint, slew limits and the output each actuator falls to when cut off.
// Motor commands are normalized [0,1]; tilt and surface values are radians.
struct ActuatorLayout {
  std::vector<std::string> names;
  Eigen::VectorXd u_min;
  Eigen::VectorXd u_max;
  Eigen::VectorXd u_trim;
  Eigen::VectorXd rate_limit;   // max |du/dt| per second
  Eigen::VectorXd zero_effect;  // output when cut off

  int size() const { return static_cast<int>(names.size()); }

  int index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
      throw std::invalid_argument("unknown actuator: " + name);
    return static_cast<int>(it - names.begin());
  }

  void validate() const {
    const auto n = static_cast<Eigen::Index>(names.size());
    if (u_min.size() != n || u_max.size() != n || u_trim.size() != n ||
        rate_limit.size() != n || zero_effect.size() != n)
      throw std::invalid_argument("actuator layout: inconsistent vector sizes");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(u_min[i] <= u_trim[i] && u_trim[i] <= u_max[i]))
        throw std::invalid_argument("actuator layout: trim outside limits for " +
                                    names[static_cast<size_t>(i)]);
    }
    for (size_t i = 0; i < names.size(); ++i)
      for (size_t j = i + 1; j < names.size(); ++j)
        if (names[i] == names[j])
          throw std::invalid_argument("actuator layout: duplicate name " + names[i]);
  }
};

enum class FailureMode {
  Cutoff,  // output forced to the actuator's zero-effect value
  Locked,  // output held at a fixed value
};

struct Failure {
  int actuator = -1;
  FailureMode mode = FailureMode::Cutoff;
  double value = 0.0;  // locked position; ignored for cutoff
};

// Active failures, keyed by actuator index. Indices must be unique.
struct FailureSet {
  std::vector<Failure> entries;

  bool empty() const { return entries.empty(); }

  bool contains(int index) const {
    for (const auto& f : entries)
      if (f.actuator == index) return true;
    return false;
  }

  // Output the failed actuator is pinned to.
  double forced_value(const Failure& f, const ActuatorLayout& layout) const {
    return f.mode == FailureMode::Cutoff ? layout.zero_effect[f.actuator] : f.value;
  }

  void validate(const ActuatorLayout& layout) const {
    for (const auto& f : entries) {
      if (f.actuator < 0 || f.actuator >= layout.size())
        throw std::invalid_argument("failure set: actuator index out of range");
      if (f.mode == FailureMode::Locked &&
          (f.value < layout.u_min[f.actuator] || f.value > layout.u_max[f.actuator]))
        throw std::invalid_argument("failure set: locked value outside physical range");
    }
    for (size_t i = 0; i < entries.size(); ++i)
      for (size_t j = i + 1; j < entries.size(); ++j)
        if (entries[i].actuator == entries[j].actuator)
          throw std::invalid_argument("failure set: duplicate actuator index");
  }
};

}  // namespace fdr
