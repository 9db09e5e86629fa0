#include <gtest/gtest.h>

#include <cmath>

#include "zrp/model.hpp"
#include "zrp/rng.hpp"

namespace zrp {
namespace {

TEST(Rate, ThresholdTable) {
  const auto spec = ModelSpec::simple(2, 100.0);
  EXPECT_EQ(spec.rate(0), 0.0);
  EXPECT_EQ(spec.rate(1), 1.0);
  EXPECT_EQ(spec.rate(2), 100.0);
  EXPECT_EQ(spec.rate(3), 1.0);
  const auto pd = ModelSpec::simple(2, 100.0, AboveVariant::PdRatio);
  EXPECT_DOUBLE_EQ(pd.rate(5), 1.25);
}

TEST(LogWeight, Examples) {
  EXPECT_EQ(ModelSpec::simple(2, 100.0).log_weight(1), 0.0);
  EXPECT_DOUBLE_EQ(ModelSpec::simple(2, 100.0).log_weight(7), -std::log(100.0));

  const auto pd = ModelSpec::simple(2, 100.0, AboveVariant::PdRatio);
  double direct = 0.0;
  for (int k = 1; k <= 4; ++k) direct -= std::log(pd.rate(k));
  EXPECT_NEAR(pd.log_weight(4), -std::log(100.0) + std::log(2.0 / 4.0), 1e-14);
  EXPECT_NEAR(pd.log_weight(4), direct, 1e-14);
}

TEST(LogWeight, BulkWeightsFollowRates) {
  const ModelSpec spec(3, {0.5, 2.0}, 10.0);
  EXPECT_NEAR(spec.weight(1), 2.0, 1e-15);
  EXPECT_NEAR(spec.weight(2), 1.0, 1e-15);
  EXPECT_NEAR(spec.weight(3), 0.1, 1e-15);
  EXPECT_NEAR(spec.theta_eff(), 10.0, 1e-12);
  const ModelSpec skew(2, {1.0 / 3.0}, 10.0);
  EXPECT_NEAR(skew.theta_eff(), 10.0 / 3.0, 1e-12);
  EXPECT_NEAR(skew.weight(5), 1.0 / skew.theta_eff(), 1e-15);
}

TEST(ModelSpec, RejectsInvalid) {
  EXPECT_THROW(ModelSpec(1, {}, 10.0), std::invalid_argument);
  EXPECT_THROW(ModelSpec(3, {1.0}, 10.0), std::invalid_argument);
  EXPECT_THROW(ModelSpec(2, {0.0}, 10.0), std::invalid_argument);
  EXPECT_THROW(ModelSpec(2, {1.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(ModelSpec::simple(2, 1.0).rate(-1), std::invalid_argument);
}

// Random specs: w(n-1)/w(n) = g(n); constant tail for ConstantOne; uniform n w(n) for PdRatio.
TEST(ModelProperty, WeightsAndRatesConsistent) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int A = 2 + static_cast<int>(rng.below(5));
    std::vector<double> bulk(A - 1);
    for (auto& g : bulk) g = std::exp(4.0 * rng.uniform() - 2.0);
    const double theta = std::exp(12.0 * rng.uniform());
    const auto variant = rng.below(2) ? AboveVariant::PdRatio : AboveVariant::ConstantOne;
    const ModelSpec spec(A, bulk, theta, variant);
    for (int n = 1; n <= 60; ++n) {
      const double ratio = std::exp(spec.log_weight(n - 1) - spec.log_weight(n));
      EXPECT_NEAR(ratio / spec.rate(n), 1.0, 1e-12) << "A=" << A << " n=" << n;
      EXPECT_GT(spec.rate(n), 0.0);
    }
    for (int n = A; n <= 60; ++n) {
      if (variant == AboveVariant::ConstantOne)
        EXPECT_NEAR(spec.log_weight(n), spec.log_weight(A), 1e-12);
      else
        EXPECT_NEAR(n * spec.weight(n) / (A * spec.weight(A)), 1.0, 1e-12);
    }
  }
  const auto unit = ModelSpec::simple(4, 50.0);
  for (int n = 4; n < 40; ++n) EXPECT_NEAR(unit.log_weight(n), -std::log(50.0), 1e-14);
}

TEST(ThetaScaling, Examples) {
  EXPECT_DOUBLE_EQ((ThetaScaling{1.0, 1.0}).theta_of(1024), 1024.0);
  EXPECT_DOUBLE_EQ((ThetaScaling{2.0, 1.0}).theta_of(8192), 16384.0);
  EXPECT_NEAR((ThetaScaling{1.0, 2.5}).theta_of(256), std::pow(2.0, 20), 1e-6);
  EXPECT_THROW((ThetaScaling{1.0, 1.0}).theta_of(0), std::invalid_argument);
  EXPECT_THROW((ThetaScaling{1.0, 0.0}).validate(), std::invalid_argument);
  const ThetaScaling byN{1.0, 0.5, ScalingBase::ParticlesN};
  EXPECT_DOUBLE_EQ(byN.theta_for(4, 8192), std::sqrt(8192.0));
}

}  // namespace
}  // namespace zrp
