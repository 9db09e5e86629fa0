#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "zrp/configuration.hpp"
#include "zrp/limits.hpp"

namespace zrp {

/// S_x = eta_1 + ... + eta_x.
inline std::vector<std::int64_t> integrated_profile(const Configuration& config) {
  std::vector<std::int64_t> s(config.occupations.size());
  std::int64_t run = 0;
  for (std::size_t x = 0; x < s.size(); ++x) s[x] = run += config.occupations[x];
  return s;
}

/// Number of cluster sites, eta_x >= A.
inline std::int64_t cluster_count(const Configuration& config, std::int64_t A) {
  return std::count_if(config.occupations.begin(), config.occupations.end(),
                       [A](std::int64_t n) { return n >= A; });
}

struct MaxSite {
  std::int64_t M = 0;
  std::vector<std::int64_t> sites;  // 1-based, as printed
};

/// Size of the maximum and every site attaining it.
inline MaxSite max_site(const Configuration& config) {
  MaxSite r;
  if (config.occupations.empty()) return r;
  r.M = *std::max_element(config.occupations.begin(), config.occupations.end());
  for (std::size_t x = 0; x < config.occupations.size(); ++x)
    if (config.occupations[x] == r.M) r.sites.push_back(static_cast<std::int64_t>(x) + 1);
  return r;
}

/**
 * Size-biased empirical tail (1/N) sum_x eta_x 1{eta_x > u C}, pooled over
 * samples: total mass above u C divided by total mass.
 */
inline TailCurve empirical_sb_tail(std::span<const Configuration> samples, double C,
                                   std::span<const double> grid) {
  if (!(C > 0.0)) throw std::invalid_argument("empirical_sb_tail: scale must be positive");
  TailCurve curve{{grid.begin(), grid.end()}, std::vector<double>(grid.size(), 0.0)};
  double mass = 0.0;
  for (const auto& s : samples) {
    mass += static_cast<double>(s.N);
    for (auto n : s.occupations)
      for (std::size_t i = 0; i < grid.size() && static_cast<double>(n) > grid[i] * C; ++i)
        curve.values[i] += static_cast<double>(n);
  }
  if (mass <= 0.0) throw std::invalid_argument("empirical_sb_tail: no particles in the samples");
  for (auto& v : curve.values) v /= mass;
  return curve;
}

/**
 * Size-biased tail restricted to cluster sites:
 * sum_x eta_x 1{eta_x > u C} / sum_x eta_x 1{eta_x >= A}.
 */
inline TailCurve cluster_sb_tail(std::span<const Configuration> samples, std::int64_t A, double C,
                                 std::span<const double> grid) {
  if (!(C > 0.0)) throw std::invalid_argument("cluster_sb_tail: scale must be positive");
  TailCurve curve{{grid.begin(), grid.end()}, std::vector<double>(grid.size(), 0.0)};
  double mass = 0.0;
  for (const auto& s : samples)
    for (auto n : s.occupations) {
      if (n < A) continue;
      mass += static_cast<double>(n);
      for (std::size_t i = 0; i < grid.size() && static_cast<double>(n) > grid[i] * C; ++i)
        curve.values[i] += static_cast<double>(n);
    }
  if (mass <= 0.0) throw std::invalid_argument("cluster_sb_tail: no cluster sites in the samples");
  for (auto& v : curve.values) v /= mass;
  return curve;
}

/// Conditioned cluster tail sum_x 1{eta_x > u C} / sum_x 1{eta_x >= A}.
inline TailCurve cluster_tail(std::span<const Configuration> samples, std::int64_t A, double C,
                              std::span<const double> grid) {
  if (!(C > 0.0)) throw std::invalid_argument("cluster_tail: scale must be positive");
  TailCurve curve{{grid.begin(), grid.end()}, std::vector<double>(grid.size(), 0.0)};
  double clusters = 0.0;
  for (const auto& s : samples)
    for (auto n : s.occupations) {
      if (n < A) continue;
      clusters += 1.0;
      for (std::size_t i = 0; i < grid.size() && static_cast<double>(n) > grid[i] * C; ++i)
        curve.values[i] += 1.0;
    }
  if (clusters == 0.0) throw std::invalid_argument("cluster_tail: no cluster sites in the samples");
  for (auto& v : curve.values) v /= clusters;
  return curve;
}

/// Cluster sizes eta_x / C over all cluster sites (for sample-based KS tests).
inline std::vector<double> cluster_sizes(std::span<const Configuration> samples, std::int64_t A, double C) {
  std::vector<double> out;
  for (const auto& s : samples)
    for (auto n : s.occupations)
      if (n >= A) out.push_back(static_cast<double>(n) / C);
  return out;
}

}  // namespace zrp
