#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace zrp {

/// Jump rate used for occupations above the threshold A.
enum class AboveVariant {
  ConstantOne,  // g(n) = 1
  PdRatio,      // g(n) = n / (n - 1)
};

inline std::string to_string(AboveVariant v) {
  return v == AboveVariant::ConstantOne ? "const" : "pd";
}

/**
 * Rate family of a zero-range process with one fast rate.
 *
 *   g(0) = 0, g(n) = bulk_rates[n-1] for 1 <= n < A, g(A) = theta,
 *   g(n) = 1 or n/(n-1) for n > A.
 *
 * Stationary weights are the rate products w(n) = prod_{k<=n} 1/g(k). Weights
 * for n <= A are cached at construction; larger occupations use the closed
 * form of the selected variant.
 */
class ModelSpec {
 public:
  ModelSpec(int threshold, std::vector<double> bulk_rates, double theta,
            AboveVariant variant = AboveVariant::ConstantOne)
      : threshold_(threshold),
        bulk_rates_(std::move(bulk_rates)),
        theta_(theta),
        variant_(variant) {
    if (threshold_ < 2) throw std::invalid_argument("ModelSpec: threshold A must be >= 2");
    if (static_cast<int>(bulk_rates_.size()) != threshold_ - 1)
      throw std::invalid_argument("ModelSpec: expected A-1 bulk rates");
    for (double g : bulk_rates_)
      if (!(g > 0.0) || !std::isfinite(g))
        throw std::invalid_argument("ModelSpec: bulk rates must be positive and finite");
    if (!(theta_ > 0.0) || !std::isfinite(theta_))
      throw std::invalid_argument("ModelSpec: theta must be positive and finite");

    log_w_.resize(threshold_ + 1);
    log_w_[0] = 0.0;
    for (int n = 1; n <= threshold_; ++n) log_w_[n] = log_w_[n - 1] - std::log(rate(n));
  }

  /// Unit bulk rates: w(n) = 1 below A.
  static ModelSpec simple(int threshold, double theta,
                          AboveVariant variant = AboveVariant::ConstantOne) {
    return ModelSpec(threshold, std::vector<double>(threshold - 1, 1.0), theta, variant);
  }

  int threshold() const noexcept { return threshold_; }
  double theta() const noexcept { return theta_; }
  AboveVariant variant() const noexcept { return variant_; }
  std::span<const double> bulk_rates() const noexcept { return bulk_rates_; }

  /// Same bulk rates and variant, different fast rate.
  ModelSpec with_theta(double theta) const {
    return ModelSpec(threshold_, bulk_rates_, theta, variant_);
  }

  double rate(std::int64_t n) const {
    if (n < 0) throw std::invalid_argument("rate: negative occupation");
    if (n == 0) return 0.0;
    if (n < threshold_) return bulk_rates_[n - 1];
    if (n == threshold_) return theta_;
    if (variant_ == AboveVariant::ConstantOne) return 1.0;
    return static_cast<double>(n) / static_cast<double>(n - 1);
  }

  /// Largest rate among occupations above A.
  double max_above_rate() const noexcept {
    return variant_ == AboveVariant::ConstantOne
               ? 1.0
               : static_cast<double>(threshold_ + 1) / threshold_;
  }

  double log_weight(std::int64_t n) const {
    if (n < 0) throw std::invalid_argument("log_weight: negative occupation");
    if (n <= threshold_) return log_w_[n];
    if (variant_ == AboveVariant::ConstantOne) return log_w_[threshold_];
    return log_w_[threshold_] + std::log(static_cast<double>(threshold_) / static_cast<double>(n));
  }

  double weight(std::int64_t n) const { return std::exp(log_weight(n)); }

  /// log w(0..n_max) as a dense table, the form used in the inner loops.
  std::vector<double> log_weights(std::int64_t n_max) const {
    std::vector<double> out(static_cast<std::size_t>(n_max + 1));
    for (std::int64_t n = 0; n <= n_max; ++n) out[n] = log_weight(n);
    return out;
  }

  /// theta / w(A-1): the fast rate with the last bulk weight absorbed, so w(A) = 1/theta_eff.
  double theta_eff() const noexcept { return theta_ / std::exp(log_w_[threshold_ - 1]); }

 private:
  int threshold_;
  std::vector<double> bulk_rates_;
  double theta_;
  AboveVariant variant_;
  std::vector<double> log_w_;  // log w(0..A)
};

/// Which system size the fast rate is scaled with.
enum class ScalingBase { VolumeL, ParticlesN };

/// theta(m) = Theta * m^gamma.
struct ThetaScaling {
  double Theta = 1.0;
  double gamma = 1.0;
  ScalingBase base = ScalingBase::VolumeL;

  void validate() const {
    if (!(Theta > 0.0)) throw std::invalid_argument("ThetaScaling: Theta must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("ThetaScaling: gamma must be positive");
  }

  double theta_of(std::int64_t m) const {
    if (m < 1) throw std::invalid_argument("theta_of: system size must be >= 1");
    return Theta * std::pow(static_cast<double>(m), gamma);
  }

  /// Picks L or N according to `base`.
  double theta_for(std::int64_t L, std::int64_t N) const {
    return theta_of(base == ScalingBase::VolumeL ? L : N);
  }
};

inline double theta_of(const ThetaScaling& s, std::int64_t m) { return s.theta_of(m); }

}  // namespace zrp
