#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace fdr {

// ARX(na, nb, nk) structure: the current output is regressed on the last na
// outputs and nb inputs delayed by the dead time nk.
struct ArxConfig {
  int na = 2;
  int nb = 2;
  int nk = 1;

  int order() const { return na + nb; }

  void validate() const {
    if (na < 0 || nb < 0 || nk < 0)
      throw std::invalid_argument("arx config: orders must be nonnegative");
    if (na + nb < 1)
      throw std::invalid_argument("arx config: na + nb must be at least 1");
  }
};

// Exponentially weighted recursive least squares for one signal pair.
// Coefficients are ordered [a1..a_na, b0..b_{nb-1}]. The covariance stays
// symmetric by construction and its trace is capped to stop the classic
// windup under zero excitation with forgetting < 1.
class RlsEstimator {
 public:
  explicit RlsEstimator(const ArxConfig& config, double forgetting = 0.995,
                        double cov_init = 1e6, double cov_trace_max = 1e8)
      : config_(config), forgetting_(forgetting), cov_trace_max_(cov_trace_max) {
    config_.validate();
    if (forgetting_ <= 0.0 || forgetting_ > 1.0)
      throw std::invalid_argument("rls: forgetting factor must be in (0, 1]");
    if (cov_init <= 0.0) throw std::invalid_argument("rls: cov_init must be positive");
    theta_ = Eigen::VectorXd::Zero(config_.order());
    cov_ = cov_init * Eigen::MatrixXd::Identity(config_.order(), config_.order());
  }

  double predict(const Eigen::VectorXd& phi) const {
    if (phi.size() != theta_.size())
      throw std::invalid_argument("rls predict: regressor dimension mismatch");
    return phi.dot(theta_);
  }

  // One RLS step. Returns the prior residual y - phi'theta (computed before
  // the coefficient update), or nothing when the sample is non-finite, in
  // which case the estimator is left untouched.
  std::optional<double> update(const Eigen::VectorXd& phi, double y) {
    if (phi.size() != theta_.size())
      throw std::invalid_argument("rls update: regressor dimension mismatch");
    if (!phi.allFinite() || !std::isfinite(y)) return std::nullopt;

    const double residual = y - phi.dot(theta_);
    const Eigen::VectorXd cov_phi = cov_ * phi;
    const double denom = forgetting_ + phi.dot(cov_phi);
    const Eigen::VectorXd gain = cov_phi / denom;
    theta_ += gain * residual;
    cov_ = (cov_ - gain * cov_phi.transpose()) / forgetting_;
    cov_ = 0.5 * (cov_ + cov_.transpose().eval());
    const double tr = cov_.trace();
    if (tr > cov_trace_max_) cov_ *= cov_trace_max_ / tr;
    ++samples_seen_;
    return residual;
  }

  const ArxConfig& config() const { return config_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  double forgetting() const { return forgetting_; }
  long samples_seen() const { return samples_seen_; }

 private:
  ArxConfig config_;
  double forgetting_;
  double cov_trace_max_;
  Eigen::VectorXd theta_;
  Eigen::MatrixXd cov_;
  long samples_seen_ = 0;
};

}  // namespace fdr
