#pragma once

// Reference limit laws for the condensed phase, the asymptotic partition
// functions they come from, and Kolmogorov-Smirnov style distances.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "zrp/ensemble.hpp"
#include "zrp/model.hpp"

namespace zrp {

/// Survival function sampled on an ascending grid of rescaled sizes u.
struct TailCurve {
  std::vector<double> grid;
  std::vector<double> values;

  bool well_formed() const {
    if (grid.size() != values.size()) return false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] >= 0.0 && values[i] <= 1.0)) return false;
      if (i > 0 && (grid[i] <= grid[i - 1] || values[i] > values[i - 1])) return false;
    }
    return true;
  }
};

/// Evenly spaced grid lo, lo+step, ... <= hi.
inline std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("make_grid: bad range");
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

/// CDF of the atom rho_c/rho at 0 mixed with Gamma(2,1) weight (rho-rho_c)/rho.
inline double gamma21_mixture_cdf(double u, double rho, double rho_c) {
  if (!(rho > rho_c) || rho_c < 0.0) throw std::domain_error("gamma21_mixture_cdf: need rho > rho_c >= 0");
  if (u < 0.0) return 0.0;
  const double body = -std::expm1(-u) - u * std::exp(-u);  // 1 - e^-u (1+u)
  return rho_c / rho + (rho - rho_c) / rho * body;
}

/// Exponential cluster-size tail e^{-u}.
inline double exponential_cluster_tail(double u) { return u <= 0.0 ? 1.0 : std::exp(-u); }

/// Marginal of the uniform law on the L-simplex: 1 - (1-u)^{L-1}.
inline double simplex_marginal_cdf(double u, long L) {
  if (L < 2) throw std::domain_error("simplex_marginal_cdf: need L >= 2");
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - u, static_cast<double>(L - 1));
}

/// Beta(1,1) survival 1 - u on [0,1].
inline double beta11_tail(double u) { return std::clamp(1.0 - u, 0.0, 1.0); }

/**
 * Exponential order of Z_{L,N} at supercritical density:
 *   log Z ~ L log z(1) + (L / sqrt(theta_eff)) f(rho),  f(rho) = 2 sqrt((rho - rho_c) / z(1)).
 * The sub-exponential prefactor is not modelled.
 */
inline double asymptotic_logZ_thermo(const ModelSpec& spec, long L, long N) {
  const double rho = static_cast<double>(N) / static_cast<double>(L);
  const double rc = rho_c(spec);
  if (rho < rc) throw std::domain_error("asymptotic_logZ_thermo: requires rho >= rho_c");
  const double z1 = z_inf(spec, 1.0);
  const double f = 2.0 * std::sqrt((rho - rc) / z1);
  return L * std::log(z1) + L / std::sqrt(spec.theta_eff()) * f;
}

/// log of the fixed-volume K-sum z(1)^L sum_{K=1}^L (z(1) theta)^{-K} C(L,K) N^{K-1}/(K-1)!.
inline double log_Z_fixedL_sum(const ModelSpec& spec, long L, long N) {
  if (L < 1 || N < 1) throw std::domain_error("log_Z_fixedL_sum: need L, N >= 1");
  const double lz = std::log(z_inf(spec, 1.0));
  const double lt = std::log(spec.theta_eff());
  const double lN = std::log(static_cast<double>(N));
  double acc = -std::numeric_limits<double>::infinity();
  for (long K = 1; K <= L; ++K) {
    const double lchoose = std::lgamma(L + 1.0) - std::lgamma(K + 1.0) - std::lgamma(L - K + 1.0);
    const double term = L * lz - K * (lz + lt) + lchoose + (K - 1) * lN - std::lgamma(static_cast<double>(K));
    acc = acc > term ? acc + std::log1p(std::exp(term - acc)) : term + std::log1p(std::exp(acc - term));
  }
  return acc;
}

/// Leading term of the K-sum: one cluster if theta >= N, L clusters otherwise.
inline double log_Z_fixedL_leading(const ModelSpec& spec, long L, long N) {
  const double lz = std::log(z_inf(spec, 1.0));
  const double lt = std::log(spec.theta_eff());
  if (spec.theta_eff() >= static_cast<double>(N)) return std::log(static_cast<double>(L)) + (L - 1) * lz - lt;
  return (L - 1) * std::log(static_cast<double>(N)) - L * lt - std::lgamma(static_cast<double>(L));
}

inline double asymptotic_Z_fixedL(const ModelSpec& spec, long L, long N) {
  return std::exp(log_Z_fixedL_leading(spec, L, N));
}

/**
 * One-sample Kolmogorov-Smirnov distance sup_u |F_n(u) - F(u)| between the
 * empirical CDF of `samples` and `cdf`. Both one-sided limits at every jump are
 * checked. `samples` is sorted in place.
 */
inline double ks_distance(std::vector<double>& samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double f = cdf(samples[i]);
    // left limit of the cdf at a jump; right-continuous references make this conservative
    const double f_left = cdf(std::nextafter(samples[i], -std::numeric_limits<double>::infinity()));
    d = std::max(d, std::abs(f_left - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(j) / n));
    i = j;
  }
  return d;
}

inline double ks_distance(std::vector<double>&& samples, const std::function<double(double)>& cdf) {
  return ks_distance(samples, cdf);
}

/// Sup-norm distance between a sampled tail curve and a reference survival function.
inline double ks_distance(const TailCurve& curve, const std::function<double(double)>& tail) {
  if (curve.grid.empty()) throw std::invalid_argument("ks_distance: empty curve");
  double d = 0.0;
  for (std::size_t i = 0; i < curve.grid.size(); ++i)
    d = std::max(d, std::abs(curve.values[i] - tail(curve.grid[i])));
  return d;
}

}  // namespace zrp
