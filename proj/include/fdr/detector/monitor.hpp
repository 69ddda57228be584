#pragma once

#include <cmath>
#include <stdexcept>

namespace fdr {

struct MonitorConfig {
  double smoothing = 0.999;   // exponential weight on the running statistics
  double sigma_floor = 1e-6;  // lower clamp on the standard deviation
  double z_threshold = 5.0;
  int debounce = 3;           // consecutive over-threshold samples to alarm
  int warmup = 200;           // samples absorbed before alarms are allowed

  void validate() const {
    if (smoothing <= 0.0 || smoothing >= 1.0)
      throw std::invalid_argument("monitor: smoothing must be in (0, 1)");
    if (sigma_floor <= 0.0) throw std::invalid_argument("monitor: sigma floor must be positive");
    if (z_threshold <= 0.0) throw std::invalid_argument("monitor: z threshold must be positive");
    if (debounce < 1) throw std::invalid_argument("monitor: debounce must be >= 1");
    if (warmup < 0) throw std::invalid_argument("monitor: warmup must be nonnegative");
  }
};

// Streaming residual statistics with a Z-score alarm. Mean and variance are
// exponentially weighted with bias correction so the estimates are usable
// from the first absorbed sample. While the score sits over the threshold the
// statistics are frozen, so a fault is never absorbed into its own baseline.
class ResidualMonitor {
 public:
  explicit ResidualMonitor(const MonitorConfig& config) : cfg_(config) { cfg_.validate(); }

  // Monitor pre-loaded with converged statistics.
  static ResidualMonitor warm(double mean, double variance, const MonitorConfig& config) {
    ResidualMonitor m(config);
    m.ewm_ = mean;
    m.ewv_ = variance;
    m.discount_ = 0.0;  // bias correction factor = 1
    m.count_ = 1000000;
    return m;
  }

  struct Step {
    double z = 0.0;
    bool alarmed = false;
  };

  Step update(double residual) {
    if (!std::isfinite(residual))
      throw std::invalid_argument("monitor: non-finite residual");

    const double correction = 1.0 - discount_;
    const double mean_hat = count_ > 0 ? ewm_ / correction : 0.0;
    const double var_hat = count_ > 0 ? std::max(ewv_ / correction, 0.0) : 0.0;
    // an empty monitor has no baseline to score against
    const double z =
        count_ > 0 ? (residual - mean_hat) / std::max(std::sqrt(var_hat), cfg_.sigma_floor)
                   : 0.0;

    const bool eligible = count_ > 0 && count_ >= cfg_.warmup;
    const bool over = std::abs(z) >= cfg_.z_threshold;
    if (eligible && over) {
      ++over_count_;
    } else {
      over_count_ = 0;
      const double s = cfg_.smoothing;
      ewm_ = s * ewm_ + (1.0 - s) * residual;
      const double dev = residual - mean_hat;
      ewv_ = s * ewv_ + (1.0 - s) * dev * dev;
      discount_ *= s;
      ++count_;
    }
    return {z, eligible && over_count_ >= cfg_.debounce};
  }

  const MonitorConfig& config() const { return cfg_; }
  long count() const { return count_; }
  int over_count() const { return over_count_; }

  double mean() const { return count_ > 0 ? ewm_ / (1.0 - discount_) : 0.0; }
  double variance() const { return count_ > 0 ? std::max(ewv_ / (1.0 - discount_), 0.0) : 0.0; }

 private:
  MonitorConfig cfg_;
  double ewm_ = 0.0;
  double ewv_ = 0.0;
  double discount_ = 1.0;  // smoothing^count, for bias correction
  long count_ = 0;
  int over_count_ = 0;
};

}  // namespace fdr
