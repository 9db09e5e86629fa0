#pragma once

// Grand-canonical single-site quantities. The system size enters only through
// theta, which the caller has already resolved for the size of interest.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "zrp/error.hpp"
#include "zrp/model.hpp"

namespace zrp {

struct EnsembleSolution {
  double phi = 0.0;
  double rho = 0.0;
  double residual = 0.0;
};

namespace detail {

inline void check_fugacity(double phi) {
  if (!(phi >= 0.0) || !(phi < 1.0))
    throw std::domain_error("fugacity must lie in [0,1); the single-site series diverges at 1");
}

// sum_{n<A} phi^n w(n) and sum_{n<A} n phi^n w(n)
struct BulkSums {
  double z = 0.0;
  double first_moment = 0.0;
};

inline BulkSums bulk_sums(const ModelSpec& spec, double phi) {
  BulkSums s;
  double pw = 1.0;
  for (int n = 0; n < spec.threshold(); ++n) {
    const double t = pw * spec.weight(n);
    s.z += t;
    s.first_moment += n * t;
    pw *= phi;
  }
  return s;
}

// sum_{n>=A} phi^n / n
inline double harmonic_tail(int A, double phi) {
  if (phi == 0.0) return 0.0;
  if (phi > 0.5) {
    // -log(1-phi) minus the head; no cancellation problem once phi is not small.
    double head = 0.0;
    double pw = 1.0;
    for (int n = 1; n < A; ++n) {
      pw *= phi;
      head += pw / n;
    }
    return -std::log1p(-phi) - head;
  }
  double term = std::pow(phi, A) / A;
  double sum = 0.0;
  for (long n = A;; ++n) {
    sum += term;
    const double next = term * phi * n / (n + 1);
    // remaining terms are bounded by next / (1 - phi)
    if (next / (1.0 - phi) <= 1e-15 * sum) break;
    term = next;
  }
  return sum;
}

}  // namespace detail

/// Single-site normalization z_L(phi) = sum_n phi^n w_L(n).
inline double z_L(const ModelSpec& spec, double phi) {
  detail::check_fugacity(phi);
  const auto bulk = detail::bulk_sums(spec, phi);
  const int A = spec.threshold();
  const double wA = spec.weight(A);
  if (spec.variant() == AboveVariant::ConstantOne)
    return bulk.z + wA * std::pow(phi, A) / (1.0 - phi);
  return bulk.z + wA * A * detail::harmonic_tail(A, phi);
}

/// Grand-canonical density R_L(phi) = phi z_L'(phi) / z_L(phi).
inline double R_L(const ModelSpec& spec, double phi) {
  detail::check_fugacity(phi);
  const auto bulk = detail::bulk_sums(spec, phi);
  const int A = spec.threshold();
  const double wA = spec.weight(A);
  const double pA = std::pow(phi, A);
  const double q = 1.0 - phi;
  double z = bulk.z;
  double m = bulk.first_moment;
  if (spec.variant() == AboveVariant::ConstantOne) {
    z += wA * pA / q;
    m += wA * pA * (A * q + phi) / (q * q);
  } else {
    // n w(n) = A w(A) for n >= A
    z += wA * A * detail::harmonic_tail(A, phi);
    m += wA * A * pA / q;
  }
  return m / z;
}

/// Limit of z_L as theta -> infinity; finite for phi in [0,1].
inline double z_inf(const ModelSpec& spec, double phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw std::domain_error("z_inf: phi must lie in [0,1]");
  return detail::bulk_sums(spec, phi).z;
}

inline double R_inf(const ModelSpec& spec, double phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw std::domain_error("R_inf: phi must lie in [0,1]");
  const auto s = detail::bulk_sums(spec, phi);
  return s.first_moment / s.z;
}

/// Critical density: mean of the bulk weights w(0..A-1).
inline double rho_c(const ModelSpec& spec) { return R_inf(spec, 1.0); }

/// Fugacity phi with R_L(phi) = rho, by bisection on [0, 1).
inline EnsembleSolution solve_fugacity(const ModelSpec& spec, double rho, double tol = 1e-10,
                                       int max_iter = 400) {
  if (!(rho >= 0.0)) throw std::domain_error("solve_fugacity: rho must be nonnegative");
  if (!(tol > 0.0)) throw std::domain_error("solve_fugacity: tol must be positive");
  if (rho == 0.0) return {0.0, 0.0, 0.0};

  double lo = 0.0;
  double hi = 1.0 - std::numeric_limits<double>::epsilon();
  if (R_L(spec, hi) < rho)
    throw NonConvergence("solve_fugacity: density exceeds R_L at the largest representable fugacity");

  double mid = 0.5 * (lo + hi);
  double r = R_L(spec, mid);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(r - rho) <= tol) return {mid, rho, std::abs(r - rho)};
    if (r < rho)
      lo = mid;
    else
      hi = mid;
    const double next = 0.5 * (lo + hi);
    if (next == lo || next == hi) break;
    mid = next;
    r = R_L(spec, mid);
  }
  if (std::abs(r - rho) <= tol) return {mid, rho, std::abs(r - rho)};
  throw NonConvergence("solve_fugacity: residual " + std::to_string(std::abs(r - rho)) +
                       " above tolerance");
}

/// Typical cluster size C_L = sqrt((rho - rho_c) z(1) theta_eff).
inline double cluster_scale(const ModelSpec& spec, double rho) {
  const double rc = rho_c(spec);
  if (!(rho > rc)) throw std::domain_error("cluster_scale: requires rho > rho_c");
  return std::sqrt((rho - rc) * z_inf(spec, 1.0) * spec.theta_eff());
}

/// Leading-order fugacity 1 - 1/C_L at supercritical density.
inline double phi_asymptotic(const ModelSpec& spec, double rho) {
  return 1.0 - 1.0 / cluster_scale(spec, rho);
}

}  // namespace zrp
