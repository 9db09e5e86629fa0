#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "zrp/limits.hpp"
#include "zrp/partition.hpp"
#include "zrp/rng.hpp"

namespace zrp {
namespace {

TEST(Gamma21Mixture, Examples) {
  EXPECT_DOUBLE_EQ(gamma21_mixture_cdf(0.0, 1.0, 0.5), 0.5);
  EXPECT_NEAR(gamma21_mixture_cdf(60.0, 1.0, 0.5), 1.0, 1e-15);
  EXPECT_NEAR(gamma21_mixture_cdf(1.0, 1.0, 0.5), 0.5 + 0.5 * (1.0 - 2.0 / std::numbers::e), 1e-15);
  EXPECT_NEAR(gamma21_mixture_cdf(1.0, 1.0, 0.5), 0.63212, 1e-5);
  EXPECT_THROW(gamma21_mixture_cdf(1.0, 0.5, 0.5), std::domain_error);
}

TEST(Gamma21Mixture, MonotoneWithAtom) {
  double prev = 0.0;
  for (double u = 0.0; u <= 20.0; u += 0.01) {
    const double f = gamma21_mixture_cdf(u, 3.0, 2.0);
    EXPECT_GE(f, prev);
    prev = f;
  }
  EXPECT_DOUBLE_EQ(gamma21_mixture_cdf(0.0, 3.0, 2.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(gamma21_mixture_cdf(-1e-12, 3.0, 2.0), 0.0);
}

// d/du [1 - e^-u (1+u)] = u e^-u: the size-biased exponential.
TEST(Gamma21Mixture, SizeBiasedExponentialDensity) {
  const double h = 1e-5;
  for (double u = 0.1; u <= 10.0; u += 0.1) {
    const double d = (gamma21_mixture_cdf(u + h, 2.0, 0.0) - gamma21_mixture_cdf(u - h, 2.0, 0.0)) / (2 * h);
    EXPECT_NEAR(d, u * std::exp(-u), 1e-6);
  }
}

TEST(ExponentialTail, Examples) {
  EXPECT_DOUBLE_EQ(exponential_cluster_tail(0.0), 1.0);
  EXPECT_DOUBLE_EQ(exponential_cluster_tail(1.0), std::exp(-1.0));
  EXPECT_NEAR(exponential_cluster_tail(std::log(2.0)), 0.5, 1e-15);
}

TEST(Simplex, Examples) {
  EXPECT_DOUBLE_EQ(simplex_marginal_cdf(1.0, 5), 1.0);
  EXPECT_DOUBLE_EQ(simplex_marginal_cdf(0.0, 5), 0.0);
  for (double u = 0.0; u <= 1.0; u += 0.05) EXPECT_NEAR(simplex_marginal_cdf(u, 2), u, 1e-15);
  EXPECT_THROW(simplex_marginal_cdf(0.5, 1), std::domain_error);
}

TEST(Beta11, Examples) {
  EXPECT_DOUBLE_EQ(beta11_tail(0.0), 1.0);
  EXPECT_DOUBLE_EQ(beta11_tail(1.0), 0.0);
  EXPECT_DOUBLE_EQ(beta11_tail(0.25), 0.75);
}

TEST(AsymptoticThermo, Examples) {
  const auto spec = ModelSpec::simple(2, 256.0);
  // rho = rho_c: f = 0
  EXPECT_NEAR(asymptotic_logZ_thermo(spec, 256, 128), 256 * std::log(2.0), 1e-10);
  // rho = 1: f = 1, so the excess is L / sqrt(theta) = 16
  EXPECT_NEAR(asymptotic_logZ_thermo(spec, 256, 256) - 256 * std::log(2.0), 16.0, 1e-10);
  EXPECT_THROW(asymptotic_logZ_thermo(spec, 256, 100), std::domain_error);
}

// The residual against the exact table grows sublinearly in L.
TEST(AsymptoticThermo, ResidualSublinear) {
  std::vector<double> per_site;
  for (std::int64_t L : {256, 512, 1024, 2048}) {
    const auto spec = ModelSpec::simple(2, static_cast<double>(L));
    const LogPartitionTable t(spec, L, L, TableLayout::Rolling);
    per_site.push_back(std::abs(t.log_z(L, L) - asymptotic_logZ_thermo(spec, L, L)) / L);
  }
  for (std::size_t i = 1; i < per_site.size(); ++i) EXPECT_LT(per_site[i], per_site[i - 1]);
}

TEST(FixedL, LeadingBranches) {
  const auto spec = ModelSpec::simple(2, 1e8);
  EXPECT_NEAR(asymptotic_Z_fixedL(spec, 2, 1000), 2.0 * 2.0 / 1e8, 1e-20);
  const auto low = ModelSpec::simple(2, 10.0);
  EXPECT_NEAR(asymptotic_Z_fixedL(low, 2, 100000), 100000.0 / 100.0, 1e-9);
}

TEST(FixedL, KSumMatchesExact) {
  const std::int64_t N = 100000;
  for (double theta : {double(N) * N, std::sqrt(double(N))}) {
    const auto spec = ModelSpec::simple(2, theta);
    const double exact = log_z_row(spec, 4, N)[N];
    EXPECT_NEAR(std::exp(exact - log_Z_fixedL_sum(spec, 4, N)), 1.0, 0.05);
  }
}

TEST(KsDistance, Examples) {
  const auto cdf = [](double u) { return std::clamp(u, 0.0, 1.0); };
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
  TailCurve self{grid, {}};
  for (double u : grid) self.values.push_back(1.0 - u);
  EXPECT_DOUBLE_EQ(ks_distance(self, [](double u) { return 1.0 - u; }), 0.0);
  // all mass at the median vs uniform
  EXPECT_NEAR(ks_distance(std::vector<double>(100, 0.5), cdf), 0.5, 1e-12);

  Rng rng(123);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = rng.exponential(1.0);
  EXPECT_LT(ks_distance(xs, [](double u) { return 1.0 - exponential_cluster_tail(u); }), 0.02);
  EXPECT_THROW(ks_distance(std::vector<double>{}, cdf), std::invalid_argument);
}

TEST(TailCurve, WellFormed) {
  EXPECT_TRUE((TailCurve{{0.0, 1.0}, {1.0, 0.5}}).well_formed());
  EXPECT_FALSE((TailCurve{{0.0, 1.0}, {0.5, 1.0}}).well_formed());
  EXPECT_FALSE((TailCurve{{1.0, 0.0}, {1.0, 0.5}}).well_formed());
  EXPECT_EQ(make_grid(0.0, 1.0, 0.25).size(), 5u);
}

}  // namespace
}  // namespace zrp
