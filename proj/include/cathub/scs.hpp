#pragma once

// Even/odd Schroedinger cat targets, fidelities against the heralded family,
// and its mean photon number.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "cathub/error.hpp"
#include "cathub/fock.hpp"
#include "cathub/hub.hpp"
#include "cathub/log_real.hpp"
#include "cathub/z_function.hpp"

namespace cathub {

/// Index cutoff for a cat of amplitude beta; its photon distribution is
/// Poisson-like around beta^2.
inline std::size_t scs_default_cutoff(double beta) {
  const double photons = beta * beta + 12 * beta + 40;
  return static_cast<std::size_t>(std::ceil(photons / 2));
}

/// |beta> + |-beta> (even) or |beta> - |-beta> (odd), normalized:
///   even: 2N_+ e^(-beta^2/2) beta^(2n) / sqrt((2n)!)
///   odd:  2N_- e^(-beta^2/2) beta^(2n+1) / sqrt((2n+1)!)
/// with N_+- = (2(1 +- e^(-2 beta^2)))^(-1/2). beta = 0 is the vacuum for even parity.
inline FockVector scs_state(double beta, Parity parity, std::optional<std::size_t> cutoff = std::nullopt) {
  if (parity == Parity::odd && !(beta > 0)) throw domain_error("scs_state: odd cat needs beta > 0");
  if (!(beta >= 0) || !std::isfinite(beta)) throw domain_error("scs_state: beta must be nonnegative");
  if (beta == 0) {
    std::vector<double> amps(cutoff.value_or(0) + 1, 0.0);
    amps[0] = 1;
    return {Parity::even, std::move(amps), true};
  }
  const long double lb = std::log(static_cast<long double>(beta));
  const long double b2 = static_cast<long double>(beta) * beta;
  const std::size_t shift = parity == Parity::odd ? 1 : 0;
  auto log_amp = [&](std::size_t n) {
    const std::uint64_t photons = 2 * n + shift;
    return static_cast<long double>(photons) * lb - 0.5L * detail::log_factorial_raw(photons);
  };
  // ln(2 N e^(-beta^2/2)) = ln 2 - ln(2(1 +- e^(-2 beta^2)))/2 - beta^2/2
  const long double bracket = parity == Parity::even ? 2 * (1 + std::exp(-2 * b2)) : -2 * std::expm1(-2 * b2);
  const long double log_norm = std::log(2.0L) - 0.5L * std::log(bracket) - b2 / 2;
  const std::size_t required = detail::required_cutoff(log_amp);
  std::size_t use = std::max(required, scs_default_cutoff(beta));
  if (cutoff) {
    if (*cutoff < required) throw truncation_error("scs_state: cutoff too small", required);
    use = *cutoff;
  }
  return {parity, detail::exponentiate(log_amp, use, log_norm), true};
}

/// |<a|b>|^2 for normalized vectors; zero across parities.
inline double fidelity(const FockVector& candidate, const FockVector& target) noexcept {
  const double overlap = inner_product(candidate, target);
  return overlap * overlap;
}

/// Fidelity between the m-pair heralded state at y and a target of the same
/// parity, computed only over the target's support. The heralded state is
/// normalized analytically, so no truncation of it is needed; this is what
/// the optimizer calls.
inline double heralded_fidelity(Parity parity, std::uint32_t m, double y, const FockVector& target) {
  detail::check_y(y, "heralded_fidelity");
  if (target.parity() != parity) return 0;
  const long double log_y = std::log(static_cast<long double>(y));
  const long double log_norm = heralded_log_norm(parity, m, y);
  long double overlap = 0;
  for (std::size_t n = 0; n < target.size(); ++n) {
    if (target[n] == 0) continue;
    overlap += std::exp(detail::heralded_log_term(parity, m, n, log_y) + log_norm) * target[n];
  }
  return static_cast<double>(overlap * overlap);
}

/// Mean photon number of the heralded state with N removed photons:
/// y Z^(N+1)(y) / Z^(N)(y). Parity must match N.
inline double mean_photon(Parity parity, std::uint32_t n_removed, double y) {
  if (parity_of(n_removed) != parity) throw std::invalid_argument("mean_photon: parity does not match N");
  if (y == 0) return parity == Parity::odd ? 1 : 0;  // |1> or vacuum
  detail::check_y(y, "mean_photon");
  const LogReal ratio = z_derivative(n_removed + 1, y) / z_derivative(n_removed, y);
  return static_cast<double>(y * ratio.value());
}

}  // namespace cathub
