#pragma once

// Brute-force reference: explicit beam-splitter unitaries on the truncated
// two-mode Fock basis, applied splitter by splitter to the squeezed vacuum,
// with projective or lossy photon counting on each ancilla.
//
// Every splitter maps creation operators as
//   a0+ -> t a0+ - r ai+,   ai+ -> r a0+ + t ai+.
// Nothing here uses the closed forms from hub.hpp or probabilities.hpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cathub/detector.hpp"
#include "cathub/error.hpp"
#include "cathub/fock.hpp"
#include "cathub/hub.hpp"
#include "cathub/log_real.hpp"

namespace cathub::oracle {

/// <out0, out1| U(t) |in0, in1>, by expanding
/// (t a0+ - r a1+)^in0 (r a0+ + t a1+)^in1 |0,0> / sqrt(in0! in1!).
inline double bs_matrix_element(double t, std::uint32_t in0, std::uint32_t in1, std::uint32_t out0,
                                std::uint32_t out1) {
  if (in0 + in1 != out0 + out1) return 0;
  const double r = std::sqrt(std::max(0.0, 1 - t * t));
  const long double lt = std::log(static_cast<long double>(t));
  const long double lr = r > 0 ? std::log(static_cast<long double>(r)) : -std::numeric_limits<long double>::infinity();
  auto power = [](long double log_base, std::uint32_t e) -> long double { return e == 0 ? 0.0L : e * log_base; };
  const long double lnorm = 0.5L * (detail::log_factorial_raw(out0) + detail::log_factorial_raw(out1) -
                                    detail::log_factorial_raw(in0) - detail::log_factorial_raw(in1));
  LogReal sum;
  // k photons of in0 go to mode 1, l = out1 - k photons of in1 go to mode 1.
  for (std::uint32_t k = 0; k <= std::min(in0, out1); ++k) {
    const std::uint32_t l = out1 - k;
    if (l > in1) continue;
    const long double lt_pow = power(lt, in0 - k + l);
    const long double lr_pow = power(lr, k + in1 - l);
    if (std::isinf(lt_pow) || std::isinf(lr_pow)) continue;
    const long double mag = binomial(in0, k).log_mag() + binomial(in1, l).log_mag() + lt_pow + lr_pow + lnorm;
    sum += LogReal::from_log(mag, k % 2 == 0 ? 1 : -1);
  }
  return sum.to_double();
}

/// Amplitudes over (n_signal, n_ancilla), both in 0..cutoff.
class TwoModeState {
 public:
  explicit TwoModeState(std::size_t photon_cutoff)
      : cutoff_(photon_cutoff), amps_((photon_cutoff + 1) * (photon_cutoff + 1), 0.0) {}

  std::size_t cutoff() const noexcept { return cutoff_; }
  double& at(std::size_t signal, std::size_t ancilla) { return amps_[signal * (cutoff_ + 1) + ancilla]; }
  double at(std::size_t signal, std::size_t ancilla) const { return amps_[signal * (cutoff_ + 1) + ancilla]; }

  double norm_squared() const noexcept {
    double s = 0;
    for (double a : amps_) s += a * a;
    return s;
  }

  /// Unnormalized signal amplitudes after finding n photons in the ancilla.
  std::vector<double> project_ancilla(std::size_t n) const {
    std::vector<double> out(cutoff_ + 1, 0.0);
    if (n > cutoff_) return out;
    for (std::size_t s = 0; s <= cutoff_; ++s) out[s] = at(s, n);
    return out;
  }

 private:
  std::size_t cutoff_;
  std::vector<double> amps_;
};

/// Mixes a signal (photon-number amplitudes) with a vacuum ancilla.
inline TwoModeState apply_splitter(std::span<const double> signal, double t) {
  const std::size_t cutoff = signal.empty() ? 0 : signal.size() - 1;
  TwoModeState out(cutoff);
  for (std::size_t n = 0; n <= cutoff; ++n) {
    if (signal[n] == 0) continue;
    for (std::size_t q = 0; q <= n; ++q) {
      out.at(n - q, q) += signal[n] * bs_matrix_element(t, static_cast<std::uint32_t>(n), 0,
                                                         static_cast<std::uint32_t>(n - q), static_cast<std::uint32_t>(q));
    }
  }
  return out;
}

struct HubSimulation {
  /// Normalized heralded signal state.
  FockVector state;
  LogReal probability;
  /// Signed branch coefficient, comparable to herald_amplitude():
  /// sign of the projected state times sqrt(probability * cosh s).
  LogReal amplitude;
};

/// Squeezed-vacuum amplitudes over photon number,
/// (tanh(s)/2)^n sqrt((2n)!) / (n! sqrt(cosh s)) on |2n>, up to 2 * index_cutoff photons.
inline std::vector<double> smsv_photon_amplitudes(double s, std::size_t index_cutoff) {
  std::vector<double> psi(2 * index_cutoff + 1, 0.0);
  const long double th = std::tanh(static_cast<long double>(s));
  const long double lc = std::log(std::cosh(static_cast<long double>(s)));
  for (std::size_t n = 0; n <= index_cutoff; ++n) {
    const long double l = static_cast<long double>(n) * std::log(th / 2) + 0.5L * detail::log_factorial_raw(2 * n) -
                          detail::log_factorial_raw(n) - 0.5L * lc;
    psi[2 * n] = static_cast<double>(std::exp(l));
  }
  return psi;
}

inline constexpr double kOracleTail = 1e-12;

/// Runs the squeezed vacuum through each splitter, projects ancilla i onto
/// outcome[i], and returns the heralded state and its probability.
/// `index_cutoff` bounds the source at 2 * index_cutoff photons.
inline HubSimulation simulate_hub(const HubConfig& cfg, const Outcome& outcome, std::size_t index_cutoff) {
  if (outcome.k() != cfg.k()) throw std::invalid_argument("simulate_hub: outcome length differs from k");
  if (2 * index_cutoff < outcome.total()) throw truncation_error("simulate_hub: cutoff below detected photons", outcome.total());
  std::vector<double> psi = smsv_photon_amplitudes(cfg.squeezing(), index_cutoff);
  {
    const double peak = *std::max_element(psi.begin(), psi.end(), [](double a, double b) { return a * a < b * b; });
    if (psi.back() * psi.back() > kTailTolerance * peak * peak) {
      throw truncation_error("simulate_hub: source not resolved", index_cutoff * 2);
    }
  }
  for (std::size_t i = 1; i <= cfg.k(); ++i) {
    const TwoModeState joint = apply_splitter(psi, cfg.t(i));
    psi = joint.project_ancilla(outcome[i - 1]);
  }
  double prob = 0;
  for (double a : psi) prob += a * a;

  const Parity parity = outcome.parity();
  const std::size_t shift = parity == Parity::odd ? 1 : 0;
  const std::size_t photons = psi.size() - 1 - outcome.total();  // signal photons still resolved
  std::vector<double> amps;
  int sign = 0;
  double peak = 0;
  for (std::size_t p = shift; p <= photons; p += 2) {
    amps.push_back(psi[p]);
    peak = std::max(peak, psi[p] * psi[p]);
    if (sign == 0 && psi[p] != 0) sign = psi[p] > 0 ? 1 : -1;
  }
  if (amps.empty()) amps.push_back(0);
  if (prob > 0 && amps.back() * amps.back() > kOracleTail * peak) {
    throw truncation_error("simulate_hub: heralded state dominated by boundary terms", 2 * index_cutoff);
  }
  FockVector raw(parity, std::move(amps));
  const LogReal p = LogReal(static_cast<long double>(prob));
  LogReal amplitude;
  if (prob > 0) amplitude = LogReal::from_log(0.5L * (p.log_mag() + cfg.log_cosh()), sign);
  return {prob > 0 ? raw.normalized_copy() : raw, p, amplitude};
}

struct LossyBranch {
  std::vector<std::uint32_t> true_counts;
  double weight;
  FockVector state;
};

/// Conditional signal mixture after inefficient detection, stored as an
/// ensemble of pure branches.
struct LossySimulation {
  std::vector<LossyBranch> branches;
  LogReal probability;

  /// Weighted branch fidelity to a pure target.
  double fidelity(const FockVector& target) const {
    double acc = 0, total = 0;
    for (const auto& b : branches) {
      total += b.weight;
      const double ov = inner_product(b.state, target);
      acc += b.weight * ov * ov;
    }
    return total > 0 ? acc / total : 0;
  }
};

/// Every detector has efficiency eta and reported outcome[i]; true counts
/// j_i >= outcome[i] are enumerated shell by shell in the number of lost
/// photons until three consecutive shells stay below 1e-16 of the largest
/// branch, or the cutoff is reached.
inline LossySimulation simulate_lossy(const HubConfig& cfg, const Outcome& outcome, double eta, std::size_t index_cutoff) {
  if (outcome.k() != cfg.k()) throw std::invalid_argument("simulate_lossy: outcome length differs from k");
  std::vector<PovmElement> povm;
  for (std::size_t i = 0; i < cfg.k(); ++i) povm.push_back(povm_element(outcome[i], eta, 2 * index_cutoff));
  LossySimulation out;
  double best = 0;
  int quiet = 0;
  const std::size_t k = cfg.k();
  const std::uint32_t budget = static_cast<std::uint32_t>(2 * index_cutoff) - outcome.total();
  std::vector<std::uint32_t> counts(k);
  for (std::uint32_t extra = 0; extra <= budget; ++extra) {
    double shell_max = 0;
    std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t pos, std::uint32_t left) {
      if (pos + 1 == k) {
        counts[pos] = outcome[pos] + left;
        double w_det = 1;
        for (std::size_t i = 0; i < k; ++i) w_det *= povm[i].weight(counts[i]);
        if (w_det == 0) return;
        HubSimulation sim = simulate_hub(cfg, Outcome(counts), index_cutoff);
        const double w = sim.probability.to_double() * w_det;
        shell_max = std::max(shell_max, w);
        out.probability += LogReal(static_cast<long double>(w));
        out.branches.push_back({counts, w, std::move(sim.state)});
        return;
      }
      for (std::uint32_t v = 0; v <= left; ++v) {
        counts[pos] = outcome[pos] + v;
        rec(pos + 1, left - v);
      }
    };
    rec(0, extra);
    if (eta == 1) break;
    best = std::max(best, shell_max);
    if (shell_max < 1e-16 * best) {
      if (++quiet >= 3) break;
    } else {
      quiet = 0;
    }
  }
  return out;
}

}  // namespace cathub::oracle
