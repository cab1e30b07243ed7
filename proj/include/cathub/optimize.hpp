#pragma once

// Bounded scalar maximization: a uniform scan to find the global bracket,
// then golden-section refinement inside it.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cathub/fock.hpp"
#include "cathub/scs.hpp"

namespace cathub {

struct OptResult {
  double y_star = 0;
  double fidelity = 0;
  int evaluations = 0;
  double bracket_lo = 0;
  double bracket_hi = 0;
  /// Strict local maxima seen on the coarse scan. More than one means the
  /// objective is not unimodal on the searched interval.
  int scan_local_maxima = 0;
};

struct ScanOptions {
  int points = 256;
  double tolerance = 1e-10;
};

struct GoldenResult {
  double x;
  double fx;
  double lo;
  double hi;
};

/// Golden-section maximization of a unimodal f on [lo, hi] until
/// hi - lo <= tol. Ties keep the left half.
template <class F>
GoldenResult golden_section_maximize(F&& f, double lo, double hi, double tol, int& evaluations) {
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  evaluations += 2;
  while (hi - lo > tol) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
    ++evaluations;
  }
  const double x = 0.5 * (lo + hi);
  ++evaluations;
  return {x, f(x), lo, hi};
}

/// Scan f at `points` equally spaced nodes of [lo, hi], take the first node
/// with the largest value (smaller x wins ties), and refine by golden section
/// between its neighbours.
template <class F>
OptResult scan_and_refine(F&& f, double lo, double hi, const ScanOptions& opt = {}) {
  if (opt.points < 3) throw std::invalid_argument("scan_and_refine: need at least 3 scan points");
  if (!(lo < hi)) throw std::invalid_argument("scan_and_refine: empty interval");
  OptResult res;
  const int n = opt.points;
  std::vector<double> xs(n), fs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + (hi - lo) * i / (n - 1);
    fs[i] = f(xs[i]);
  }
  res.evaluations = n;
  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (fs[i] > fs[best]) best = i;
  }
  for (int i = 0; i < n; ++i) {
    const bool left = i == 0 || fs[i] > fs[i - 1];
    const bool right = i == n - 1 || fs[i] > fs[i + 1];
    if (left && right) ++res.scan_local_maxima;
  }
  const double a = xs[best > 0 ? best - 1 : 0];
  const double b = xs[best < n - 1 ? best + 1 : n - 1];
  GoldenResult g = golden_section_maximize(f, a, b, opt.tolerance, res.evaluations);
  // Never lose to the scan node itself (plateaus, rounding at the edges).
  if (g.fx < fs[best]) g = {xs[best], fs[best], xs[best], xs[best]};
  res.y_star = g.x;
  res.fidelity = g.fx;
  res.bracket_lo = g.lo;
  res.bracket_hi = g.hi;
  return res;
}

inline constexpr double kOptimalYLow = 1e-6;
inline constexpr double kOptimalYHigh = 0.5 - 1e-6;

/// The y in [1e-6, 0.5 - 1e-6] maximizing the fidelity of the heralded state
/// with N removed photons to the cat of amplitude beta and the same parity.
inline OptResult optimal_y(Parity parity, std::uint32_t n_removed, double beta, const ScanOptions& opt = {}) {
  if (parity_of(n_removed) != parity) throw std::invalid_argument("optimal_y: parity does not match N");
  if (!(beta > 0)) throw domain_error("optimal_y: beta must be positive");
  const FockVector target = scs_state(beta, parity);
  const std::uint32_t m = n_removed / 2;
  return scan_and_refine([&](double y) { return heralded_fidelity(parity, m, y, target); }, kOptimalYLow,
                         kOptimalYHigh, opt);
}

}  // namespace cathub
