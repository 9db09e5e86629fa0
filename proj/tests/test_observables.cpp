#include <gtest/gtest.h>

#include "zrp/observables.hpp"

namespace zrp {
namespace {

TEST(IntegratedProfile, Examples) {
  EXPECT_EQ(integrated_profile(Configuration({0, 0, 7})), (std::vector<std::int64_t>{0, 0, 7}));
  EXPECT_EQ(integrated_profile(Configuration({1, 1, 1})), (std::vector<std::int64_t>{1, 2, 3}));
}

TEST(ClusterCount, Examples) {
  EXPECT_EQ(cluster_count(Configuration({1, 0, 1, 1}), 2), 0);
  EXPECT_EQ(cluster_count(Configuration({9, 0, 0}), 2), 1);
  EXPECT_EQ(cluster_count(Configuration({2, 3, 1}), 2), 2);
}

TEST(MaxSite, Examples) {
  const auto m = max_site(Configuration({3, 1, 3}));
  EXPECT_EQ(m.M, 3);
  EXPECT_EQ(m.sites, (std::vector<std::int64_t>{1, 3}));
  EXPECT_EQ(max_site(Configuration({2, 2, 2})).sites.size(), 3u);
}

TEST(EmpiricalSbTail, Examples) {
  const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
  const std::vector<Configuration> cond{Configuration({10, 0, 0, 0})};
  const auto t = empirical_sb_tail(cond, 5.0, grid);
  EXPECT_EQ(t.values, (std::vector<double>{1.0, 1.0, 1.0, 0.0}));
  const std::vector<Configuration> bulk{Configuration({1, 1, 0, 1})};
  const auto b = empirical_sb_tail(bulk, 4.0, grid);
  EXPECT_DOUBLE_EQ(b.values[0], 1.0);
  EXPECT_DOUBLE_EQ(b.values[1], 0.0);
  EXPECT_TRUE(b.well_formed());
  EXPECT_THROW(empirical_sb_tail(bulk, 0.0, grid), std::invalid_argument);
}

TEST(ClusterTail, Examples) {
  const std::vector<double> grid{0.0, 1.0, 2.0};
  const std::vector<Configuration> exact_A{Configuration({2, 0, 1})};
  EXPECT_DOUBLE_EQ(cluster_tail(exact_A, 2, 1.0, grid).values[0], 1.0);
  const std::vector<Configuration> none{Configuration({1, 1, 1})};
  EXPECT_THROW(cluster_tail(none, 2, 1.0, grid), std::invalid_argument);
  const std::vector<Configuration> two{Configuration({2, 6, 0}), Configuration({4, 0, 0})};
  // cluster sizes / C = 1, 3, 2
  EXPECT_EQ(cluster_tail(two, 2, 2.0, grid).values, (std::vector<double>{1.0, 2.0 / 3.0, 1.0 / 3.0}));
  EXPECT_EQ(cluster_sb_tail(two, 2, 2.0, grid).values, (std::vector<double>{1.0, 10.0 / 12.0, 6.0 / 12.0}));
  EXPECT_EQ(cluster_sizes(two, 2, 2.0), (std::vector<double>{1.0, 3.0, 2.0}));
}

}  // namespace
}  // namespace zrp
