#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdr/detector/monitor.hpp"
#include "fdr/detector/rls.hpp"

namespace fdr {

struct DetectionEvent {
  double time = 0.0;  // seconds since stream start
  std::string channel;
  double z_score = 0.0;
  double residual = 0.0;
};

struct ChannelConfig {
  std::string name = "channel";
  std::string input;   // commanded signal
  std::string output;  // measured signal
  ArxConfig arx{};
  double forgetting = 0.995;
  double cov_init = 1e6;
  double cov_trace_max = 1e8;
  int settle_samples = 50;  // predictions discarded before the monitor engages
  MonitorConfig monitor{};
};

// Fixed-capacity most-recent-first sample buffer.
class SignalHistory {
 public:
  explicit SignalHistory(int capacity) : buf_(static_cast<size_t>(std::max(capacity, 0))) {}

  void push(double v) {
    if (buf_.empty()) return;
    head_ = (head_ + 1) % buf_.size();
    buf_[head_] = v;
    if (size_ < buf_.size()) ++size_;
  }

  bool full() const { return size_ == buf_.size(); }
  int capacity() const { return static_cast<int>(buf_.size()); }

  // back = 0 is the newest sample
  double at(int back) const {
    if (back < 0 || static_cast<size_t>(back) >= size_)
      throw std::logic_error("signal history: insufficient history");
    return buf_[(head_ + buf_.size() - static_cast<size_t>(back)) % buf_.size()];
  }

 private:
  std::vector<double> buf_;
  size_t head_ = 0;
  size_t size_ = 0;
};

// phi = [y(t-1)..y(t-na), u(t-nk)..u(t-nk-nb+1)]; the input history must
// already contain the current sample u(t).
inline Eigen::VectorXd build_regressor(const SignalHistory& outputs,
                                       const SignalHistory& inputs,
                                       const ArxConfig& arx) {
  if (!outputs.full() || !inputs.full())
    throw std::logic_error("build_regressor: history buffers not yet full");
  Eigen::VectorXd phi(arx.order());
  for (int i = 0; i < arx.na; ++i) phi(i) = outputs.at(i);
  for (int j = 0; j < arx.nb; ++j) phi(arx.na + j) = inputs.at(arx.nk + j);
  return phi;
}

// One commanded/measured signal pair: ARX prediction by RLS, residual
// Z-score monitoring, detection events on the alarm's rising edge.
class DetectorChannel {
 public:
  explicit DetectorChannel(const ChannelConfig& cfg)
      : cfg_(cfg),
        est_(cfg.arx, cfg.forgetting, cfg.cov_init, cfg.cov_trace_max),
        mon_(cfg.monitor),
        inputs_(cfg.arx.nb + cfg.arx.nk),
        outputs_(cfg.arx.na) {}

  struct Trace {
    double y_hat = 0.0;
    double residual = 0.0;
    double z = 0.0;
    bool alarmed = false;
    bool predicted = false;
  };

  std::optional<DetectionEvent> step(double u, double y, double time) {
    last_ = Trace{};
    if (!std::isfinite(u) || !std::isfinite(y)) {
      ++skipped_;
      return std::nullopt;
    }
    inputs_.push(u);

    std::optional<DetectionEvent> event;
    if (inputs_.full() && outputs_.full()) {
      const Eigen::VectorXd phi = build_regressor(outputs_, inputs_, cfg_.arx);
      last_.y_hat = est_.predict(phi);
      last_.residual = *est_.update(phi, y);
      last_.predicted = true;
      ++predictions_;
      if (predictions_ > cfg_.settle_samples) {
        const auto step = mon_.update(last_.residual);
        last_.z = step.z;
        last_.alarmed = step.alarmed;
        if (step.alarmed && !latched_) {
          latched_ = true;
          event = DetectionEvent{time, cfg_.name, step.z, last_.residual};
        }
        if (!step.alarmed) latched_ = false;
      }
    }
    outputs_.push(y);
    return event;
  }

  const ChannelConfig& config() const { return cfg_; }
  const RlsEstimator& estimator() const { return est_; }
  const ResidualMonitor& monitor() const { return mon_; }
  const Trace& last() const { return last_; }
  int skipped_samples() const { return skipped_; }

 private:
  ChannelConfig cfg_;
  RlsEstimator est_;
  ResidualMonitor mon_;
  SignalHistory inputs_;
  SignalHistory outputs_;
  Trace last_{};
  long predictions_ = 0;
  int skipped_ = 0;
  bool latched_ = false;
};

}  // namespace fdr
