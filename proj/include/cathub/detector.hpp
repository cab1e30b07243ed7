#pragma once

// Photon-number detectors with quantum efficiency eta < 1.
//
// A detector that sees j photons reports m with probability
// C(j, m) eta^m (1-eta)^(j-m). Heralding on m then leaves a mixture of the
// states heralded by j = m, m+1, ... true photons, which costs fidelity and
// adds probability. The first-order effect of 1-eta on both is set by the
// mean photon number of the heralded state and by (1-T)/T with
// T = t_1^2 ... t_k^2.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cathub/error.hpp"
#include "cathub/fock.hpp"
#include "cathub/hub.hpp"
#include "cathub/log_real.hpp"
#include "cathub/probabilities.hpp"
#include "cathub/scs.hpp"

namespace cathub {

struct DetectorSpec {
  double eta;

  explicit DetectorSpec(double efficiency) : eta(efficiency) {
    if (!(eta > 0 && eta <= 1)) throw domain_error("DetectorSpec: efficiency " + std::to_string(eta) + " outside (0, 1]");
  }
};

/// Diagonal POVM element for the reported count m; weights[j] is the
/// probability that j true photons are reported as m.
struct PovmElement {
  std::uint32_t reported_count;
  std::vector<double> weights;

  double weight(std::size_t j) const noexcept { return j < weights.size() ? weights[j] : 0.0; }
};

/// C(j, m) eta^m (1-eta)^(j-m) for j = 0..cutoff. The even/odd bracketing of
/// the element into x-even and x-odd loss terms is the same operator.
inline PovmElement povm_element(std::uint32_t m, double eta, std::size_t cutoff) {
  const DetectorSpec spec(eta);
  if (cutoff < m) throw std::invalid_argument("povm_element: cutoff below reported count");
  PovmElement e{m, std::vector<double>(cutoff + 1, 0.0)};
  const long double le = std::log(static_cast<long double>(spec.eta));
  const long double ll = std::log1p(-static_cast<long double>(spec.eta));
  for (std::size_t j = m; j <= cutoff; ++j) {
    if (j > m && spec.eta == 1) break;
    const long double lost = static_cast<long double>(j - m);
    const long double l = binomial(j, m).log_mag() + m * le + (lost > 0 ? lost * ll : 0.0L);
    e.weights[j] = static_cast<double>(std::exp(l));
  }
  return e;
}

/// <n> (1-T)/T, the factor multiplying 1-eta in the first-order corrections.
inline double reduction_factor(double transmittance_product_sq, double mean_n) {
  const double t = transmittance_product_sq;
  if (!(t > 0 && t <= 1)) throw domain_error("reduction_factor: T outside (0, 1]");
  return mean_n * (1 - t) / t;
}

/// 1 - (1-eta) (1-T)/T <n>.
inline double fidelity_multiplier(double transmittance_product_sq, double mean_n, double eta) {
  const DetectorSpec spec(eta);
  return 1 - (1 - spec.eta) * reduction_factor(transmittance_product_sq, mean_n);
}

/// 1 + (1-eta) (1-T)/T <n>.
inline double probability_multiplier(double transmittance_product_sq, double mean_n, double eta) {
  const DetectorSpec spec(eta);
  return 1 + (1 - spec.eta) * reduction_factor(transmittance_product_sq, mean_n);
}

/// First-order fidelity multiplier with <n> taken at the given y.
inline double lossy_fidelity_firstorder(double transmittance_product_sq, std::uint32_t n_removed, Parity parity,
                                        double eta, double y) {
  return fidelity_multiplier(transmittance_product_sq, mean_photon(parity, n_removed, y), eta);
}

/// Single-splitter (1-eta)^2 coefficient
///   f2 = <n>_N/2 ((1-t^2)/t^2)^2 (2<n>_N - <n>_(N+1) (1 - R)),
/// R = F_(N+2)(y) / F_N(y), both fidelities to the same cat at the same y.
inline double second_order_coefficient(double t1, std::uint32_t n_removed, Parity parity, double y, double beta) {
  const double a = (1 - t1 * t1) / (t1 * t1);
  const double n0 = mean_photon(parity, n_removed, y);
  const double n1 = mean_photon(parity_of(n_removed + 1), n_removed + 1, y);
  const FockVector target = scs_state(beta, parity);
  const double f0 = heralded_fidelity(parity, n_removed / 2, y, target);
  const double f2 = heralded_fidelity(parity, n_removed / 2 + 1, y, target);
  const double ratio = f2 / f0;
  return n0 / 2 * a * a * (2 * n0 - n1 * (1 - ratio));
}

/// 1 - (1-eta) a <n> + (1-eta)^2 f2 for one splitter.
inline double lossy_fidelity_secondorder(double t1, std::uint32_t n_removed, Parity parity, double eta, double y,
                                         double beta) {
  const double d = 1 - DetectorSpec(eta).eta;
  return lossy_fidelity_firstorder(t1 * t1, n_removed, parity, eta, y) +
         d * d * second_order_coefficient(t1, n_removed, parity, y, beta);
}

namespace detail {

inline constexpr long double kBranchCut = 1e-16L;
inline constexpr int kBranchRun = 50;
inline constexpr std::uint32_t kMaxLostPhotons = 5000;

/// Calls visit(j, weight) for each true count j >= m feeding the reported
/// count m, weight = P_ideal(j) C(j, m) eta^m (1-eta)^(j-m), until the weights
/// stay below 1e-16 of the largest for a run of terms.
template <class Visit>
void for_each_loss_branch(const HubConfig& cfg, std::uint32_t m, double eta, Visit&& visit) {
  if (cfg.k() != 1) throw std::invalid_argument("lossy computations need a single splitter");
  const DetectorSpec spec(eta);
  const long double le = std::log(static_cast<long double>(spec.eta));
  const long double ll = std::log1p(-static_cast<long double>(spec.eta));
  long double best = -std::numeric_limits<long double>::infinity();
  int run = 0;
  for (std::uint32_t j = m; j <= m + kMaxLostPhotons; ++j) {
    if (j > m && spec.eta == 1) break;
    const LogReal ideal = joint_success_prob(cfg, Outcome{j});
    const std::uint32_t lost = j - m;
    const LogReal w = ideal * LogReal::from_log(binomial(j, m).log_mag() + m * le + (lost > 0 ? lost * ll : 0.0L));
    visit(j, w);
    if (w.is_zero()) break;
    if (w.log_mag() > best) best = w.log_mag();
    if (w.log_mag() < best + std::log(kBranchCut)) {
      if (++run >= kBranchRun) break;
    } else {
      run = 0;
    }
  }
}

}  // namespace detail

/// Fidelity of the state heralded by an inefficient detector reporting m,
/// single splitter, against the cat of amplitude beta with the parity of m.
inline double lossy_fidelity_exact(const HubConfig& cfg, std::uint32_t m, double eta, double beta) {
  const Parity parity = parity_of(m);
  const FockVector target = scs_state(beta, parity);
  const double y = cfg.y_final();
  LogReal total, good;
  detail::for_each_loss_branch(cfg, m, eta, [&](std::uint32_t j, const LogReal& w) {
    total += w;
    if (parity_of(j) == parity && !w.is_zero()) good += w * LogReal(heralded_fidelity(parity, j / 2, y, target));
  });
  return static_cast<double>((good / total).value());
}

/// Probability that an inefficient detector behind one splitter reports m.
inline LogReal lossy_prob(const HubConfig& cfg, std::uint32_t m, double eta) {
  LogReal total;
  detail::for_each_loss_branch(cfg, m, eta, [&](std::uint32_t, const LogReal& w) { total += w; });
  return total;
}

/// eta^m P(eta = 1) (1 + (1-eta) (1-t^2)/t^2 <n>_m).
inline LogReal lossy_prob_firstorder(const HubConfig& cfg, std::uint32_t m, double eta) {
  if (cfg.k() != 1) throw std::invalid_argument("lossy_prob_firstorder: single splitter only");
  const LogReal ideal = joint_success_prob(cfg, Outcome{m});
  const double mult = probability_multiplier(cfg.transmittance_product_sq(), mean_photon(parity_of(m), m, cfg.y_final()), eta);
  return ideal * LogReal::from_log(m * std::log(static_cast<long double>(eta))) * LogReal(mult);
}

struct Tradeoff {
  /// (1-eta)^2 ((1-T)/T)^2 <n>^2 F(1) P(1)
  double closed_form;
  /// Delta F * Delta P with both differences from the first-order multipliers.
  double first_order_product;
  double delta_fidelity;
  double delta_probability;
};

/// Fidelity loss times probability gain. The two entries coincide
/// identically; they differ once Delta F and Delta P come from exact sums.
inline Tradeoff tradeoff_product(double transmittance_product_sq, std::uint32_t n_removed, Parity parity, double eta,
                                 double y, double fidelity_ideal, double prob_ideal) {
  const double mean_n = mean_photon(parity, n_removed, y);
  const double d = 1 - DetectorSpec(eta).eta;
  const double factor = reduction_factor(transmittance_product_sq, mean_n);
  Tradeoff out{};
  out.closed_form = d * d * factor * factor * fidelity_ideal * prob_ideal;
  out.delta_fidelity = fidelity_ideal * (1 - fidelity_multiplier(transmittance_product_sq, mean_n, eta));
  out.delta_probability = prob_ideal * (probability_multiplier(transmittance_product_sq, mean_n, eta) - 1);
  out.first_order_product = out.delta_fidelity * out.delta_probability;
  return out;
}

}  // namespace cathub
