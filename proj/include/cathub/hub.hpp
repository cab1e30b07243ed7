#pragma once

// The squeezed-vacuum source, the beam-splitter chain and the heralded states
// it produces.
//
// A squeezed vacuum with amplitude s passes k beam splitters in a row; splitter
// i reflects part of the light into ancilla mode i where a photon-number
// detector reports n_i. Whatever the partition (n_1, ..., n_k), the state left
// in the signal mode depends only on the total N = sum n_i and on
// y_k = t_1^2 ... t_k^2 tanh(s)/2.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cathub/error.hpp"
#include "cathub/fock.hpp"
#include "cathub/log_real.hpp"
#include "cathub/z_function.hpp"

namespace cathub {

/// Squeezing amplitude plus the transmittances of the splitter chain.
class HubConfig {
 public:
  HubConfig(double s, std::vector<double> transmittances) : s_(s), t_(std::move(transmittances)) {
    if (!(s_ > 0) || !std::isfinite(s_)) throw domain_error("HubConfig: squeezing amplitude must be positive");
    if (t_.empty()) throw std::invalid_argument("HubConfig: at least one beam splitter is required");
    for (double t : t_) {
      if (!(t > 0 && t <= 1)) throw domain_error("HubConfig: transmittance " + std::to_string(t) + " outside (0, 1]");
    }
    y_.resize(t_.size() + 1);
    y_[0] = std::tanh(s_) / 2;
    for (std::size_t i = 0; i < t_.size(); ++i) y_[i + 1] = y_[i] * t_[i] * t_[i];
  }

  /// Chain whose final y equals `y_final`, with s back-solved from
  /// y_final = T tanh(s)/2. Fails when that would need tanh(s) >= 1.
  static HubConfig for_final_y(double y_final, std::vector<double> transmittances) {
    double product = 1;
    for (double t : transmittances) product *= t * t;
    const double tanh_s = 2 * y_final / product;
    if (!(tanh_s > 0 && tanh_s < 1)) {
      throw domain_error("HubConfig: y_k = " + std::to_string(y_final) + " needs y_0 >= 0.5");
    }
    return HubConfig(std::atanh(tanh_s), std::move(transmittances));
  }

  double squeezing() const noexcept { return s_; }
  std::size_t k() const noexcept { return t_.size(); }
  std::span<const double> transmittances() const noexcept { return t_; }

  /// 1-based, as in the optical layout.
  double t(std::size_t i) const { return t_.at(i - 1); }
  double r(std::size_t i) const { return std::sqrt(1 - t(i) * t(i)); }

  /// y_i for i = 0..k; y_0 = tanh(s)/2.
  double y(std::size_t i) const { return y_.at(i); }
  double y_final() const noexcept { return y_.back(); }

  /// t_1^2 t_2^2 ... t_k^2.
  double transmittance_product_sq() const noexcept { return y_.back() / y_.front(); }

  double squeezing_db() const noexcept { return 20 * s_ / std::log(10.0); }
  double mean_photons_source() const noexcept { return std::sinh(s_) * std::sinh(s_); }
  long double log_cosh() const noexcept { return std::log(std::cosh(static_cast<long double>(s_))); }

 private:
  double s_;
  std::vector<double> t_;
  std::vector<double> y_;
};

/// Photon counts reported by the k detectors.
class Outcome {
 public:
  explicit Outcome(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) throw std::invalid_argument("Outcome: at least one detector is required");
  }
  Outcome(std::initializer_list<std::uint32_t> counts) : Outcome(std::vector<std::uint32_t>(counts)) {}

  std::span<const std::uint32_t> counts() const noexcept { return counts_; }
  std::size_t k() const noexcept { return counts_.size(); }
  std::uint32_t operator[](std::size_t i) const { return counts_.at(i); }
  std::uint32_t total() const noexcept { return std::accumulate(counts_.begin(), counts_.end(), 0u); }
  Parity parity() const noexcept { return parity_of(total()); }
  std::uint32_t m_n() const noexcept { return total() / 2; }

 private:
  std::vector<std::uint32_t> counts_;
};

namespace detail {

inline void check_y(double y, const char* who) {
  if (!(y > 0) || !(y < 0.5)) throw domain_error(std::string(who) + ": y = " + std::to_string(y) + " outside (0, 0.5)");
}

/// Unnormalized log-amplitude of index n of the m-pair heralded family.
inline long double heralded_log_term(Parity parity, std::uint64_t m, std::uint64_t n, long double log_y) {
  if (parity == Parity::even) {
    return static_cast<long double>(n) * log_y + log_factorial_raw(2 * (n + m)) - log_factorial_raw(n + m) -
           0.5L * log_factorial_raw(2 * n);
  }
  return static_cast<long double>(n) * log_y + log_factorial_raw(2 * (n + m + 1)) - log_factorial_raw(n + m + 1) -
         0.5L * log_factorial_raw(2 * n + 1);
}

/// First index past the peak of a unimodal log-amplitude sequence where the
/// squared amplitude drops below kTailTolerance of the peak.
template <class LogAmp>
std::size_t required_cutoff(LogAmp&& log_amp, std::size_t limit = 100'000'000) {
  const long double threshold = 0.5L * std::log(static_cast<long double>(kTailTolerance));
  long double peak = log_amp(0);
  for (std::size_t n = 1; n < limit; ++n) {
    const long double l = log_amp(n);
    if (l > peak) {
      peak = l;
    } else if (l - peak <= threshold) {
      return n;
    }
  }
  throw truncation_error("state does not decay within the index limit", limit);
}

template <class LogAmp>
std::vector<double> exponentiate(LogAmp&& log_amp, std::size_t cutoff, long double log_norm) {
  std::vector<double> amps(cutoff + 1);
  for (std::size_t n = 0; n <= cutoff; ++n) amps[n] = static_cast<double>(std::exp(log_amp(n) + log_norm));
  return amps;
}

}  // namespace detail

/// Default index cutoff for an m-pair heralded state: smallest n with
/// 2n >= 8(m+1) + 40/(1-2y).
inline std::size_t default_cutoff(std::uint64_t m, double y) {
  const double photons = 8.0 * static_cast<double>(m + 1) + 40.0 / (1 - 2 * y);
  return static_cast<std::size_t>(std::ceil(photons / 2));
}

/// Log of the normalization constant of the heralded family:
/// -ln Z^(2m)(y)/2 for even, (ln y - ln Z^(2m+1)(y))/2 for odd.
inline long double heralded_log_norm(Parity parity, std::uint32_t m, double y) {
  if (parity == Parity::even) return -0.5L * z_derivative(2 * m, y).log_mag();
  return 0.5L * (std::log(static_cast<long double>(y)) - z_derivative(2 * m + 1, y).log_mag());
}

/// Signal state after 2m (even) or 2m+1 (odd) photons were removed, with
/// amplitudes
///   even: y^n (2(n+m))! / (sqrt((2n)!) (n+m)!)  / sqrt(Z^(2m)(y))
///   odd:  y^n (2(n+m+1))! / (sqrt((2n+1)!) (n+m+1)!) * sqrt(y / Z^(2m+1)(y))
/// Without an explicit cutoff the default is widened until the tail bound holds.
inline FockVector heralded_state(Parity parity, std::uint32_t m, double y,
                                 std::optional<std::size_t> cutoff = std::nullopt) {
  detail::check_y(y, "heralded_state");
  const long double log_y = std::log(static_cast<long double>(y));
  auto log_amp = [&](std::size_t n) { return detail::heralded_log_term(parity, m, n, log_y); };
  const std::size_t required = detail::required_cutoff(log_amp);
  std::size_t use = std::max(required, default_cutoff(m, y));
  if (cutoff) {
    if (*cutoff < required) throw truncation_error("heralded_state: cutoff too small", required);
    use = *cutoff;
  }
  return {parity, detail::exponentiate(log_amp, use, heralded_log_norm(parity, m, y)), true};
}

/// Squeezed vacuum, amplitudes y0^n sqrt((2n)!)/n! / sqrt(cosh s), y0 = tanh(s)/2.
inline FockVector smsv_state(double s, std::optional<std::size_t> cutoff = std::nullopt) {
  if (!(s > 0) || !std::isfinite(s)) throw domain_error("smsv_state: squeezing amplitude must be positive");
  const long double log_y0 = std::log(std::tanh(static_cast<long double>(s)) / 2);
  auto log_amp = [&](std::size_t n) {
    return static_cast<long double>(n) * log_y0 + 0.5L * detail::log_factorial_raw(2 * n) -
           detail::log_factorial_raw(n);
  };
  const std::size_t required = detail::required_cutoff(log_amp);
  std::size_t use = std::max(required, default_cutoff(0, std::tanh(s) / 2));
  if (cutoff) {
    if (*cutoff < required) throw truncation_error("smsv_state: cutoff too small", required);
    use = *cutoff;
  }
  const long double log_norm = -0.5L * std::log(std::cosh(static_cast<long double>(s)));
  return {Parity::even, detail::exponentiate(log_amp, use, log_norm), true};
}

/// Coefficient C of the branch |Psi_N>|n_1>...|n_k> in the output of the chain,
/// including the (-1)^N sign:
///   prod_l ((1-t_l^2)/t_l^2)^(n_l/2) y_l^(n_l/2) / sqrt(n_l!) * sqrt(Z^(N)(y_k)).
/// The branch probability is C^2 / cosh s.
inline LogReal herald_amplitude(const HubConfig& cfg, const Outcome& outcome) {
  if (outcome.k() != cfg.k()) throw std::invalid_argument("herald_amplitude: outcome length differs from k");
  long double l = 0;
  for (std::size_t i = 1; i <= cfg.k(); ++i) {
    const std::uint32_t n = outcome[i - 1];
    if (n == 0) continue;
    const long double t2 = static_cast<long double>(cfg.t(i)) * cfg.t(i);
    if (t2 == 1) return {};
    l += 0.5L * n * (std::log((1 - t2) / t2) + std::log(static_cast<long double>(cfg.y(i)))) -
         0.5L * detail::log_factorial_raw(n);
  }
  l += 0.5L * z_derivative(outcome.total(), cfg.y_final()).log_mag();
  return LogReal::from_log(l, outcome.total() % 2 == 0 ? 1 : -1);
}

}  // namespace cathub
