#pragma once

// Parity-tagged truncated state vectors over the photon-number basis.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace cathub {

enum class Parity { even, odd };

constexpr Parity parity_of(std::size_t photons) noexcept { return photons % 2 == 0 ? Parity::even : Parity::odd; }

constexpr std::string_view to_string(Parity p) noexcept { return p == Parity::even ? "even" : "odd"; }

inline Parity parse_parity(std::string_view s) {
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  throw std::invalid_argument("parity must be 'even' or 'odd'");
}

/// Relative size of the last stored |amplitude|^2 below which a truncation is
/// considered adequate.
inline constexpr double kTailTolerance = 1e-14;

/// Real amplitudes of a state with definite photon-number parity. Index n holds
/// the amplitude of |2n> (even) or |2n+1> (odd).
class FockVector {
 public:
  FockVector(Parity parity, std::vector<double> amps, bool normalized = false)
      : parity_(parity), amps_(std::move(amps)), normalized_(normalized) {
    if (amps_.empty()) throw std::invalid_argument("FockVector needs at least one amplitude");
  }

  Parity parity() const noexcept { return parity_; }
  std::span<const double> amps() const noexcept { return amps_; }
  double operator[](std::size_t n) const noexcept { return amps_[n]; }
  std::size_t size() const noexcept { return amps_.size(); }
  std::size_t cutoff() const noexcept { return amps_.size() - 1; }
  bool normalized() const noexcept { return normalized_; }

  std::size_t photon_number(std::size_t n) const noexcept { return 2 * n + (parity_ == Parity::odd ? 1 : 0); }

  double norm_squared() const noexcept {
    double s = 0;
    for (double a : amps_) s += a * a;
    return s;
  }

  /// <a^dagger a>, assuming the vector is normalized.
  double mean_photon() const noexcept {
    double s = 0;
    for (std::size_t n = 0; n < amps_.size(); ++n) s += static_cast<double>(photon_number(n)) * amps_[n] * amps_[n];
    return s;
  }

  /// amps[cutoff]^2 <= tol * max amps[n]^2.
  bool tail_ok(double tol = kTailTolerance) const noexcept {
    double mx = 0;
    for (double a : amps_) mx = std::max(mx, a * a);
    return amps_.back() * amps_.back() <= tol * mx;
  }

  /// Copy scaled to unit norm.
  FockVector normalized_copy() const {
    const double norm = std::sqrt(norm_squared());
    std::vector<double> out(amps_);
    for (double& a : out) a /= norm;
    return {parity_, std::move(out), true};
  }

 private:
  Parity parity_;
  std::vector<double> amps_;
  bool normalized_;
};

/// Sum over shared photon numbers; zero across parities.
inline double inner_product(const FockVector& a, const FockVector& b) noexcept {
  if (a.parity() != b.parity()) return 0;
  const std::size_t n = std::min(a.size(), b.size());
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace cathub
