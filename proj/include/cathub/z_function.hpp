#pragma once

// Z(y) = 1/sqrt(1 - 4y^2) = sum_n C(2n, n) y^(2n) and its derivatives.
//
// Z^(m)(y) normalizes the family of states obtained by removing m photons from
// a squeezed vacuum, so it is evaluated for m up to a few hundred and y up to
// just below 1/2.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "cathub/error.hpp"
#include "cathub/log_real.hpp"

namespace cathub {

namespace detail {

/// Above this y the series converges too slowly and the Leibniz expansion of
/// (1-2y)^(-1/2) (1+2y)^(-1/2) is used instead; its terms decay by at least
/// (1-2y)/(1+2y) < 0.053 there, so there is no cancellation.
inline constexpr double kSeriesLimit = 0.45;

inline constexpr int kTailRun = 50;
inline const long double kTailRatioLog = std::log(1e-18L);

/// Term-wise m-th derivative of sum_j C(2j, j) y^(2j):
///   sum_{2j >= m} [(2j)!/j!]^2 / (2j-m)! * y^(2j-m)
inline LogReal z_derivative_series(std::uint32_t m, double y) {
  const std::uint64_t j0 = (m + 1) / 2;
  if (y == 0) {
    if (m % 2 != 0) return {};
    const long double l = 2 * (log_factorial_raw(m) - log_factorial_raw(m / 2));
    return LogReal::from_log(l);
  }
  const long double ly = std::log(static_cast<long double>(y));
  long double ref = -std::numeric_limits<long double>::infinity();
  long double acc = 0;  // sum of exp(term - ref)
  int small_run = 0;
  constexpr std::uint64_t kMaxTerms = 50'000'000;
  for (std::uint64_t j = j0;; ++j) {
    if (j - j0 > kMaxTerms) throw domain_error("z_derivative: series failed to converge at y = " + std::to_string(y));
    const std::uint64_t p = 2 * j - m;
    const long double term = 2 * (log_factorial_raw(2 * j) - log_factorial_raw(j)) - log_factorial_raw(p) +
                             static_cast<long double>(p) * ly;
    if (term > ref) {
      acc = acc * std::exp(ref - term) + 1;
      ref = term;
      small_run = 0;
    } else {
      acc += std::exp(term - ref);
      if (term < ref + kTailRatioLog) {
        if (++small_run >= kTailRun) break;
      } else {
        small_run = 0;
      }
    }
  }
  return LogReal::from_log(ref + std::log(acc));
}

/// Leibniz rule on (1-2y)^(-1/2) * (1+2y)^(-1/2).
inline LogReal z_derivative_closed(std::uint32_t m, double y) {
  const long double lm = std::log1p(-2.0L * y);
  const long double lp = std::log1p(2.0L * y);
  const long double ln2 = std::numbers::ln2_v<long double>;
  // d^k (1 -+ 2y)^(-1/2) = (+-1)^k (2k)!/(2^k k!) (1 -+ 2y)^(-1/2-k)
  auto part = [&](std::uint64_t k, long double log_base) {
    return log_factorial_raw(2 * k) - log_factorial_raw(k) - static_cast<long double>(k) * ln2 -
           (static_cast<long double>(k) + 0.5L) * log_base;
  };
  LogReal sum;
  for (std::uint64_t k = 0; k <= m; ++k) {
    const std::uint64_t j = m - k;
    const long double l = log_factorial_raw(m) - log_factorial_raw(k) - log_factorial_raw(j) + part(k, lm) + part(j, lp);
    sum += LogReal::from_log(l, j % 2 == 0 ? 1 : -1);
  }
  return sum;
}

}  // namespace detail

/// d^m/dy^m of 1/sqrt(1-4y^2) for 0 <= y < 1/2.
inline LogReal z_derivative(std::uint32_t m, double y) {
  if (!(y >= 0) || !(y < 0.5)) {
    throw domain_error("z_derivative: y = " + std::to_string(y) + " outside [0, 0.5)");
  }
  if (y > detail::kSeriesLimit) return detail::z_derivative_closed(m, y);
  return detail::z_derivative_series(m, y);
}

}  // namespace cathub
