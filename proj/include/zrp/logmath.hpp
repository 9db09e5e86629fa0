#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace zrp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b))
inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return kNegInf;
  const double mx = *std::max_element(xs.begin(), xs.end());
  if (mx == kNegInf) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

/**
 * Log-space convolution: out[n] = log sum_{i+j=n} exp(a[i] + b[j]) for n <= n_max.
 * Two passes per entry (max, then sum of exponentials).
 */
inline std::vector<double> log_convolve(std::span<const double> a, std::span<const double> b,
                                        std::size_t n_max) {
  std::vector<double> out(n_max + 1, kNegInf);
  if (a.empty() || b.empty()) return out;
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  for (std::size_t n = 0; n <= n_max; ++n) {
    const std::size_t i_lo = n >= nb ? n - nb + 1 : 0;
    const std::size_t i_hi = std::min(n, na - 1);
    if (i_lo > i_hi) continue;
    double mx = kNegInf;
    for (std::size_t i = i_lo; i <= i_hi; ++i) mx = std::max(mx, a[i] + b[n - i]);
    if (mx == kNegInf) continue;
    double s = 0.0;
    for (std::size_t i = i_lo; i <= i_hi; ++i) s += std::exp(a[i] + b[n - i] - mx);
    out[n] = mx + std::log(s);
  }
  return out;
}

}  // namespace zrp
