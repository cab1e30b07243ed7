#pragma once

// Success probabilities of heralding events with ideal photon-number detectors.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "cathub/fock.hpp"
#include "cathub/hub.hpp"
#include "cathub/log_real.hpp"
#include "cathub/z_function.hpp"

namespace cathub {

namespace detail {

/// n ln((1-t^2)/t^2) + n ln y - ln n!, or -inf when t = 1 and n > 0.
inline long double log_reflect_factor(double t, double y, std::uint32_t n) {
  if (n == 0) return 0;
  const long double t2 = static_cast<long double>(t) * t;
  if (t2 == 1) return -std::numeric_limits<long double>::infinity();
  return n * (std::log((1 - t2) / t2) + std::log(static_cast<long double>(y))) - log_factorial_raw(n);
}

}  // namespace detail

/// One splitter, detector reports 2m (even) or 2m+1 (odd) photons:
///   (1/cosh s) ((1-t^2)/t^2)^N y_1^N / N! Z^(N)(y_1).
inline LogReal success_prob_single(std::uint32_t m, Parity parity, double t1, double s) {
  const HubConfig cfg(s, {t1});
  const std::uint32_t n = 2 * m + (parity == Parity::odd ? 1 : 0);
  const long double l = detail::log_reflect_factor(t1, cfg.y(1), n);
  if (std::isinf(l)) return {};
  return LogReal::from_log(l + z_derivative(n, cfg.y(1)).log_mag() - cfg.log_cosh());
}

/// Joint probability of the detector record:
///   (1/cosh s) prod_l ((1-t_l^2)/t_l^2)^(n_l) y_l^(n_l) / n_l!  Z^(N)(y_k).
inline LogReal joint_success_prob(const HubConfig& cfg, const Outcome& outcome) {
  if (outcome.k() != cfg.k()) throw std::invalid_argument("joint_success_prob: outcome length differs from k");
  long double l = -cfg.log_cosh();
  for (std::size_t i = 1; i <= cfg.k(); ++i) {
    l += detail::log_reflect_factor(cfg.t(i), cfg.y(i), outcome[i - 1]);
  }
  if (std::isinf(l)) return {};
  return LogReal::from_log(l + z_derivative(outcome.total(), cfg.y_final()).log_mag());
}

/// Probability that detector i (1-based) reports n_i given the earlier counts:
///   ((1-t_i^2)/t_i^2)^(n_i) y_i^(n_i)/n_i!  Z^(N_i)(y_i) / Z^(N_{i-1})(y_{i-1}).
/// Summed over n_i it is 1.
inline double conditional_prob(const HubConfig& cfg, std::size_t i, std::uint32_t n_i,
                               std::span<const std::uint32_t> prior) {
  if (i < 1 || i > cfg.k()) throw std::out_of_range("conditional_prob: detector index outside 1..k");
  if (prior.size() != i - 1) throw std::invalid_argument("conditional_prob: prior must hold i-1 counts");
  std::uint32_t before = 0;
  for (auto n : prior) before += n;
  const long double l = detail::log_reflect_factor(cfg.t(i), cfg.y(i), n_i);
  if (std::isinf(l)) return 0;
  const LogReal num = z_derivative(before + n_i, cfg.y(i));
  const LogReal den = z_derivative(before, cfg.y(i - 1));
  return static_cast<double>(std::exp(l + num.log_mag() - den.log_mag()));
}

/// Gain of splitting the same N photons over k identical splitters with
/// transmittance t versus one splitter, at equal y in front of the detectors:
///   t^(-2((k-1) n_1 + (k-2) n_2 + ... + n_(k-1))) N! / (n_1! ... n_k!).
inline LogReal demux_ratio(const Outcome& outcome, double t) {
  if (!(t > 0 && t <= 1)) throw domain_error("demux_ratio: t outside (0, 1]");
  const std::size_t k = outcome.k();
  long double exponent = 0;
  long double l = detail::log_factorial_raw(outcome.total());
  for (std::size_t i = 0; i < k; ++i) {
    exponent += static_cast<long double>(k - 1 - i) * outcome[i];
    l -= detail::log_factorial_raw(outcome[i]);
  }
  return LogReal::from_log(l - 2 * exponent * std::log(static_cast<long double>(t)));
}

/// Visits every outcome of k detectors with total at most `max_total`, by
/// nondecreasing total and lexicographically within a total.
template <class Visit>
void for_each_outcome(std::size_t k, std::uint32_t max_total, Visit&& visit) {
  std::vector<std::uint32_t> counts(k, 0);
  for (std::uint32_t total = 0; total <= max_total; ++total) {
    // compositions of `total` into k parts, lexicographic
    auto rec = [&](auto&& self, std::size_t pos, std::uint32_t left) -> void {
      if (pos + 1 == k) {
        counts[pos] = left;
        visit(Outcome(counts));
        return;
      }
      for (std::uint32_t v = 0; v <= left; ++v) {
        counts[pos] = v;
        self(self, pos + 1, left - v);
      }
    };
    rec(rec, 0, total);
  }
}

}  // namespace cathub
