#pragma once

// Exact canonical-ensemble computations. Everything is kept in log space:
// Z_{L,N} grows like z(1)^L and leaves double range for L of a few thousand.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "zrp/configuration.hpp"
#include "zrp/error.hpp"
#include "zrp/logmath.hpp"
#include "zrp/model.hpp"
#include "zrp/rng.hpp"

namespace zrp {

inline constexpr std::size_t kDefaultMemBudget = std::size_t{2} << 30;  // 2 GiB

namespace detail {

// Row of Z_{l+1,.} from the row of Z_{l,.} by adding one site.
inline std::vector<double> add_site(const ModelSpec& spec, std::span<const double> log_w,
                                    std::span<const double> prev) {
  const std::size_t n_max = prev.size() - 1;
  if (spec.variant() != AboveVariant::PdRatio) {
    // Weights are constant from A on, so the tail of the convolution is a prefix
    // sum of the previous row: O(A) per entry.
    const std::size_t A = static_cast<std::size_t>(spec.threshold());
    const double lwA = log_w[A];
    std::vector<double> out(n_max + 1, kNegInf);
    std::vector<double> prefix(n_max + 1);
    double run = kNegInf;
    for (std::size_t j = 0; j <= n_max; ++j) {
      run = log_add_exp(run, prev[j]);
      prefix[j] = run;
    }
    for (std::size_t n = 0; n <= n_max; ++n) {
      const std::size_t m_hi = std::min(n, A - 1);
      double mx = n >= A ? lwA + prefix[n - A] : kNegInf;
      for (std::size_t m = 0; m <= m_hi; ++m) mx = std::max(mx, log_w[m] + prev[n - m]);
      if (mx == kNegInf) continue;
      double s = n >= A ? std::exp(lwA + prefix[n - A] - mx) : 0.0;
      for (std::size_t m = 0; m <= m_hi; ++m) s += std::exp(log_w[m] + prev[n - m] - mx);
      out[n] = mx + std::log(s);
    }
    return out;
  }
  return log_convolve(log_w.first(n_max + 1), prev, n_max);
}

inline std::vector<double> empty_row(std::size_t n_max) {
  std::vector<double> r(n_max + 1, kNegInf);
  r[0] = 0.0;
  return r;
}

inline void check_budget(std::size_t doubles, std::size_t budget) {
  if (doubles > budget / sizeof(double))
    throw ResourceLimit("partition table needs " + std::to_string(doubles * sizeof(double)) +
                        " bytes, budget is " + std::to_string(budget));
}

}  // namespace detail

/// Which rows of the table are retained.
enum class TableLayout {
  Full,     // every l in [0, L_max]
  Rolling,  // only l = L_max - 1 and L_max
};

/**
 * log Z_{l,n} for 0 <= l <= L_max, 0 <= n <= N_max, built by adding one site
 * at a time. The Rolling layout keeps the last two rows only, which is enough
 * for currents, one-site marginals and the size-biased marginal at L_max.
 */
class LogPartitionTable {
 public:
  LogPartitionTable(ModelSpec spec, std::int64_t L_max, std::int64_t N_max,
                    TableLayout layout = TableLayout::Full,
                    std::size_t mem_budget = kDefaultMemBudget)
      : spec_(std::move(spec)), L_max_(L_max), N_max_(N_max), layout_(layout) {
    if (L_max < 1 || N_max < 0) throw std::invalid_argument("LogPartitionTable: need L >= 1, N >= 0");
    const std::size_t width = static_cast<std::size_t>(N_max) + 1;
    const std::size_t rows = layout == TableLayout::Full ? static_cast<std::size_t>(L_max) + 1 : 2;
    detail::check_budget(rows * width + 2 * width, mem_budget);

    log_w_ = spec_.log_weights(N_max);
    first_row_ = layout == TableLayout::Full ? 0 : L_max - 1;
    data_.assign(rows * width, kNegInf);

    std::vector<double> row = detail::empty_row(N_max);
    store(0, row);
    for (std::int64_t l = 1; l <= L_max; ++l) {
      row = detail::add_site(spec_, log_w_, row);
      store(l, row);
    }
  }

  const ModelSpec& spec() const noexcept { return spec_; }
  std::int64_t L_max() const noexcept { return L_max_; }
  std::int64_t N_max() const noexcept { return N_max_; }
  TableLayout layout() const noexcept { return layout_; }

  bool has_row(std::int64_t l) const noexcept { return l >= first_row_ && l <= L_max_; }

  std::span<const double> row(std::int64_t l) const {
    if (!has_row(l)) throw std::out_of_range("LogPartitionTable: row " + std::to_string(l) + " not retained");
    const std::size_t width = static_cast<std::size_t>(N_max_) + 1;
    return {data_.data() + static_cast<std::size_t>(l - first_row_) * width, width};
  }

  double log_z(std::int64_t l, std::int64_t n) const {
    if (n < 0 || n > N_max_) throw std::out_of_range("LogPartitionTable: n out of range");
    return row(l)[static_cast<std::size_t>(n)];
  }

  std::span<const double> log_weights() const noexcept { return log_w_; }

 private:
  void store(std::int64_t l, const std::vector<double>& r) {
    if (!has_row(l)) return;
    std::copy(r.begin(), r.end(),
              data_.begin() + static_cast<std::ptrdiff_t>((l - first_row_) * (N_max_ + 1)));
  }

  ModelSpec spec_;
  std::int64_t L_max_;
  std::int64_t N_max_;
  TableLayout layout_;
  std::int64_t first_row_ = 0;
  std::vector<double> log_w_;
  std::vector<double> data_;
};

inline LogPartitionTable build_table(const ModelSpec& spec, std::int64_t L, std::int64_t N,
                                     TableLayout layout = TableLayout::Full,
                                     std::size_t mem_budget = kDefaultMemBudget) {
  return LogPartitionTable(spec, L, N, layout, mem_budget);
}

/// log Z_{L,n}, n <= N, by repeated volume doubling. L must be a power of two.
inline std::vector<double> doubling_log_z(const ModelSpec& spec, std::int64_t L, std::int64_t N) {
  if (L < 1 || (L & (L - 1)) != 0) throw std::invalid_argument("doubling_log_z: L must be a power of two");
  std::vector<double> row = spec.log_weights(N);
  for (std::int64_t l = 1; l < L; l *= 2) row = log_convolve(row, row, static_cast<std::size_t>(N));
  return row;
}

/// log Z_{l,n}, n <= N, for a single volume l without keeping intermediate rows.
inline std::vector<double> log_z_row(const ModelSpec& spec, std::int64_t l, std::int64_t N) {
  if (l < 0 || N < 0) throw std::invalid_argument("log_z_row: negative size");
  const auto log_w = spec.log_weights(N);
  std::vector<double> acc = detail::empty_row(static_cast<std::size_t>(N));
  if (spec.variant() != AboveVariant::PdRatio) {
    for (std::int64_t i = 0; i < l; ++i) acc = detail::add_site(spec, log_w, acc);
    return acc;
  }
  // Binary powers: O(log l) full convolutions.
  std::vector<double> power = log_w;
  bool first = true;
  for (std::int64_t rest = l; rest > 0; rest >>= 1) {
    if (rest & 1) {
      acc = first ? power : log_convolve(acc, power, static_cast<std::size_t>(N));
      first = false;
    }
    if (rest > 1) power = log_convolve(power, power, static_cast<std::size_t>(N));
  }
  return acc;
}

/// Exact Z_{L,N} by enumerating every composition of N into L parts. Test oracle.
inline double brute_force_Z(const ModelSpec& spec, std::int64_t L, std::int64_t N,
                            double max_configs = 1e7) {
  if (L < 1 || N < 0) throw std::invalid_argument("brute_force_Z: need L >= 1, N >= 0");
  // C(N+L-1, L-1)
  double count = 1.0;
  for (std::int64_t k = 1; k < L; ++k) count = count * static_cast<double>(N + k) / static_cast<double>(k);
  if (count > max_configs)
    throw ResourceLimit("brute_force_Z: " + std::to_string(count) + " configurations exceed the guard");

  std::vector<double> w(static_cast<std::size_t>(N) + 1);
  for (std::int64_t n = 0; n <= N; ++n) w[n] = spec.weight(n);

  double sum = 0.0;
  double comp = 0.0;  // Kahan
  auto add = [&](double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  };
  auto recurse = [&](auto&& self, std::int64_t sites_left, std::int64_t mass_left, double prod) -> void {
    if (sites_left == 1) {
      add(prod * w[mass_left]);
      return;
    }
    for (std::int64_t m = 0; m <= mass_left; ++m) self(self, sites_left - 1, mass_left - m, prod * w[m]);
  };
  recurse(recurse, L, N, 1.0);
  return sum;
}

namespace detail {

inline void check_LN(const LogPartitionTable& t, std::int64_t L, std::int64_t N) {
  if (L < 1 || L > t.L_max() || N < 0 || N > t.N_max())
    throw std::out_of_range("(L,N) outside the partition table");
}

}  // namespace detail

/// Canonical current <g>_{L,N} = Z_{L,N-1} / Z_{L,N}.
inline double canonical_current(const LogPartitionTable& t, std::int64_t L, std::int64_t N) {
  detail::check_LN(t, L, N);
  if (N < 1) throw std::domain_error("canonical_current: requires N >= 1");
  return std::exp(t.log_z(L, N - 1) - t.log_z(L, N));
}

/// pi_{L,N}[eta_x = n] = w(n) Z_{L-1,N-n} / Z_{L,N}.
inline double occupation_marginal(const LogPartitionTable& t, std::int64_t L, std::int64_t N,
                                  std::int64_t n) {
  detail::check_LN(t, L, N);
  if (L < 2) throw std::domain_error("occupation_marginal: requires L >= 2");
  if (n < 0 || n > N) return 0.0;
  return std::exp(t.log_weights()[n] + t.log_z(L - 1, N - n) - t.log_z(L, N));
}

/// The full one-site pmf over n = 0..N.
inline std::vector<double> occupation_pmf(const LogPartitionTable& t, std::int64_t L, std::int64_t N) {
  std::vector<double> p(static_cast<std::size_t>(N) + 1);
  for (std::int64_t n = 0; n <= N; ++n) p[n] = occupation_marginal(t, L, N, n);
  return p;
}

/// Law of the first size-biased pick; pmf[k] is the probability of n = k + 1.
struct SizeBiasedLaw {
  std::int64_t L = 0;
  std::int64_t N = 0;
  std::vector<double> pmf;

  double prob(std::int64_t n) const {
    return n >= 1 && n <= N ? pmf[static_cast<std::size_t>(n - 1)] : 0.0;
  }
  /// P[eta~_1 > n]
  double tail(std::int64_t n) const {
    double s = 0.0;
    for (std::int64_t k = std::max<std::int64_t>(n + 1, 1); k <= N; ++k) s += pmf[k - 1];
    return s;
  }
};

/**
 * (L/N) n w(n) Z_{L-1,N-n} / Z_{L,N} from the raw rows; used directly when the
 * rows come from log_z_row rather than a table.
 */
inline SizeBiasedLaw size_biased_law(std::span<const double> log_w, std::span<const double> row_Lm1,
                                     double log_z_LN, std::int64_t L, std::int64_t N) {
  if (N < 1) throw std::domain_error("size-biased law requires N >= 1");
  SizeBiasedLaw law{L, N, std::vector<double>(static_cast<std::size_t>(N))};
  const double pre = std::log(static_cast<double>(L) / static_cast<double>(N));
  for (std::int64_t n = 1; n <= N; ++n)
    law.pmf[n - 1] = std::exp(pre + std::log(static_cast<double>(n)) + log_w[n] + row_Lm1[N - n] - log_z_LN);
  return law;
}

inline SizeBiasedLaw size_biased_marginal(const LogPartitionTable& t, std::int64_t L, std::int64_t N) {
  detail::check_LN(t, L, N);
  if (L == 1) {
    SizeBiasedLaw law{L, N, std::vector<double>(static_cast<std::size_t>(std::max<std::int64_t>(N, 1)), 0.0)};
    if (N < 1) throw std::domain_error("size-biased law requires N >= 1");
    law.pmf[N - 1] = 1.0;
    return law;
  }
  return size_biased_law(t.log_weights(), t.row(L - 1), t.log_z(L, N), L, N);
}

/**
 * Joint law of the first m size-biased picks:
 *   L(L-1)..(L-m+1) / (N (N-n_1) .. (N-n_1-..-n_{m-1})) * prod n_i w(n_i) * Z_{L-m,N-sum}/Z_{L,N}.
 */
inline double size_biased_joint(const LogPartitionTable& t, std::int64_t L, std::int64_t N,
                                std::span<const std::int64_t> ns) {
  detail::check_LN(t, L, N);
  const auto m = static_cast<std::int64_t>(ns.size());
  if (m < 1 || m > L) throw std::domain_error("size_biased_joint: need 1 <= m <= L");
  double lp = 0.0;
  std::int64_t used = 0;
  for (std::int64_t i = 0; i < m; ++i) {
    const std::int64_t n = ns[i];
    if (n < 1 || used + n > N) return 0.0;
    lp += std::log(static_cast<double>(L - i)) - std::log(static_cast<double>(N - used));
    lp += std::log(static_cast<double>(n)) + t.log_weights()[n];
    used += n;
  }
  if (L - m == 0 && used != N) return 0.0;
  return std::exp(lp + t.log_z(L - m, N - used) - t.log_z(L, N));
}

/// Exact draw from pi_{L,N} by sampling sites one after another from their conditional marginals.
inline Configuration exact_canonical_sample(const LogPartitionTable& t, std::int64_t L, std::int64_t N,
                                            Rng& rng) {
  detail::check_LN(t, L, N);
  if (t.layout() != TableLayout::Full) throw std::logic_error("exact sampling needs a Full table");
  const auto log_w = t.log_weights();
  std::vector<std::int64_t> occ(static_cast<std::size_t>(L), 0);
  std::int64_t left = N;
  for (std::int64_t x = 0; x + 1 < L && left > 0; ++x) {
    const std::int64_t sites = L - x;
    const double lz = t.log_z(sites, left);
    const auto rest = t.row(sites - 1);
    double u = rng.uniform();
    std::int64_t pick = -1;
    std::int64_t last_pos = 0;
    for (std::int64_t m = 0; m <= left; ++m) {
      const double p = std::exp(log_w[m] + rest[left - m] - lz);
      if (p > 0.0) last_pos = m;
      u -= p;
      if (u < 0.0) {
        pick = m;
        break;
      }
    }
    if (pick < 0) pick = last_pos;  // rounding in the cumulative sum
    occ[x] = pick;
    left -= pick;
  }
  occ[L - 1] += left;
  return Configuration(std::move(occ));
}

/**
 * Partition rows for the volumes visited when the lattice is halved recursively
 * (at most two consecutive volumes per level). Memory O(N log L); supports
 * exact sampling on systems where a full (L+1) x (N+1) table does not fit.
 */
class HalvingLadder {
 public:
  HalvingLadder(const ModelSpec& spec, std::int64_t L, std::int64_t N,
                std::size_t mem_budget = kDefaultMemBudget)
      : L_(L), N_(N) {
    if (L < 1 || N < 0) throw std::invalid_argument("HalvingLadder: need L >= 1, N >= 0");
    log_w_ = spec.log_weights(N);

    std::vector<std::int64_t> sizes{L};
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const std::int64_t s = sizes[i];
      if (s <= 1) continue;
      for (std::int64_t h : {s / 2, s - s / 2})
        if (std::find(sizes.begin(), sizes.end(), h) == sizes.end()) sizes.push_back(h);
    }
    detail::check_budget(sizes.size() * (static_cast<std::size_t>(N) + 1), mem_budget);
    std::sort(sizes.begin(), sizes.end());

    rows_[0] = detail::empty_row(static_cast<std::size_t>(N));
    for (std::int64_t s : sizes) {
      if (s == 1) {
        rows_[1] = log_w_;
      } else if (rows_.count(s - 1) != 0 && spec.variant() != AboveVariant::PdRatio) {
        rows_[s] = detail::add_site(spec, log_w_, rows_.at(s - 1));
      } else {
        rows_[s] = log_convolve(rows_.at(s / 2), rows_.at(s - s / 2), static_cast<std::size_t>(N));
      }
    }
  }

  std::int64_t L() const noexcept { return L_; }
  std::int64_t N() const noexcept { return N_; }
  std::span<const double> row(std::int64_t size) const { return rows_.at(size); }
  double log_z() const { return rows_.at(L_)[static_cast<std::size_t>(N_)]; }

  /// Exact draw from pi_{L,N}: split each block's mass between its halves.
  Configuration sample(Rng& rng) const {
    std::vector<std::int64_t> occ(static_cast<std::size_t>(L_), 0);
    struct Node {
      std::int64_t offset, size, mass;
    };
    std::vector<Node> stack{{0, L_, N_}};
    std::vector<double> weights;
    while (!stack.empty()) {
      const Node node = stack.back();
      stack.pop_back();
      if (node.size == 1 || node.mass == 0) {
        occ[node.offset] = node.mass;
        continue;
      }
      const std::int64_t s1 = node.size / 2;
      const std::int64_t s2 = node.size - s1;
      const auto left = rows_.at(s1);
      const auto right = rows_.at(s2);
      weights.assign(static_cast<std::size_t>(node.mass) + 1, 0.0);
      double mx = kNegInf;
      for (std::int64_t k = 0; k <= node.mass; ++k) {
        weights[k] = left[k] + right[node.mass - k];
        mx = std::max(mx, weights[k]);
      }
      double total = 0.0;
      for (auto& w : weights) {
        w = std::exp(w - mx);
        total += w;
      }
      double u = rng.uniform() * total;
      std::int64_t k = 0;
      for (; k < node.mass; ++k) {
        u -= weights[k];
        if (u < 0.0) break;
      }
      while (weights[k] == 0.0 && k > 0) --k;
      stack.push_back({node.offset + s1, s2, node.mass - k});
      stack.push_back({node.offset, s1, k});
    }
    return Configuration(std::move(occ));
  }

 private:
  std::int64_t L_;
  std::int64_t N_;
  std::vector<double> log_w_;
  std::map<std::int64_t, std::vector<double>> rows_;
};

/**
 * Size-biased reordering: sites are drawn without replacement with
 * probability proportional to their remaining mass; empty sites are dropped
 * (they would be stacked at the end). Uses the exponential-race identity:
 * sorting E_x / eta_x with E_x ~ Exp(1) gives the same law.
 */
inline std::vector<std::int64_t> size_biased_reorder(const Configuration& config, Rng& rng) {
  if (config.N < 1) throw std::domain_error("size_biased_reorder: requires N >= 1");
  std::vector<std::pair<double, std::int64_t>> keyed;
  keyed.reserve(config.occupations.size());
  for (auto n : config.occupations)
    if (n > 0) keyed.emplace_back(rng.exponential(static_cast<double>(n)), n);
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::int64_t> out;
  out.reserve(keyed.size());
  for (const auto& [key, n] : keyed) out.push_back(n);
  return out;
}

}  // namespace zrp
