#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace zrp {

/// Occupation vector eta with its conserved particle count.
struct Configuration {
  std::vector<std::int64_t> occupations;
  std::int64_t N = 0;

  Configuration() = default;
  explicit Configuration(std::vector<std::int64_t> occ)
      : occupations(std::move(occ)),
        N(std::accumulate(occupations.begin(), occupations.end(), std::int64_t{0})) {
    for (auto n : occupations)
      if (n < 0) throw std::invalid_argument("Configuration: negative occupation");
  }

  std::int64_t L() const noexcept { return static_cast<std::int64_t>(occupations.size()); }

  bool valid() const {
    std::int64_t s = 0;
    for (auto n : occupations) {
      if (n < 0) return false;
      s += n;
    }
    return s == N;
  }

  /// N particles dealt round-robin over L sites.
  static Configuration uniform(std::int64_t L, std::int64_t N) {
    if (L < 1 || N < 0) throw std::invalid_argument("Configuration::uniform: bad size");
    std::vector<std::int64_t> occ(static_cast<std::size_t>(L), N / L);
    for (std::int64_t x = 0; x < N % L; ++x) ++occ[x];
    return Configuration(std::move(occ));
  }
};

}  // namespace zrp
