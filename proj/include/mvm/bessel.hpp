#ifndef MVM_BESSEL_HPP
#define MVM_BESSEL_HPP

#include <cmath>

#include "mvm/errors.hpp"
#include "mvm/torus.hpp"

namespace mvm {

namespace detail {

inline constexpr double bessel_series_limit = 15.0;

// sum_k (x/2)^{2k} / (k!)^2, all terms positive
inline double bessel_i0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// sqrt(2 pi x) e^{-x} I0(x) = sum_k ((2k-1)!!)^2 / (k! (8x)^k), truncated at
// the smallest term.
inline double bessel_i0_asymptotic_factor(double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * odd * odd / (static_cast<double>(k) * 8.0 * x);
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

inline void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0)) throw InvalidArgument(std::string(what) + ": argument must be >= 0");
}

}  // namespace detail

/// Modified Bessel function of the first kind, order zero.
inline double bessel_i0(double x) {
  detail::require_nonnegative(x, "bessel_i0");
  if (x <= detail::bessel_series_limit) return detail::bessel_i0_series(x);
  return std::exp(x) / std::sqrt(two_pi * x) * detail::bessel_i0_asymptotic_factor(x);
}

/// e^{-x} I0(x), finite for every x >= 0.
inline double bessel_i0_scaled(double x) {
  detail::require_nonnegative(x, "bessel_i0_scaled");
  if (x <= detail::bessel_series_limit) return std::exp(-x) * detail::bessel_i0_series(x);
  return detail::bessel_i0_asymptotic_factor(x) / std::sqrt(two_pi * x);
}

inline double log_bessel_i0(double x) {
  detail::require_nonnegative(x, "log_bessel_i0");
  if (x <= detail::bessel_series_limit) return std::log(detail::bessel_i0_series(x));
  return x - 0.5 * std::log(two_pi * x) + std::log(detail::bessel_i0_asymptotic_factor(x));
}

}  // namespace mvm

#endif  // MVM_BESSEL_HPP
