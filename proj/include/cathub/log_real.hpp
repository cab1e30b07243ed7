#pragma once

// Signed log-domain reals and log-factorials.
//
// Amplitudes and probabilities in photon-subtraction problems are products of
// factorial ratios like (2(n+m))!/(n+m)! that overflow a double long before
// the quantities of interest do. Everything combinatorial is assembled here in
// the log domain and exponentiated at the end.

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <vector>

namespace cathub {

class LogReal {
 public:
  using value_type = long double;

  /// Zero.
  constexpr LogReal() noexcept = default;

  explicit LogReal(value_type x) noexcept {
    if (x > 0) {
      sign_ = 1;
      log_mag_ = std::log(x);
    } else if (x < 0) {
      sign_ = -1;
      log_mag_ = std::log(-x);
    }
  }

  static LogReal from_log(value_type log_mag, int sign = 1) noexcept {
    LogReal r;
    if (sign == 0 || log_mag == -std::numeric_limits<value_type>::infinity()) return r;
    r.sign_ = sign > 0 ? 1 : -1;
    r.log_mag_ = log_mag;
    return r;
  }

  static LogReal zero() noexcept { return {}; }
  static LogReal one() noexcept { return from_log(0); }

  int sign() const noexcept { return sign_; }
  /// ln|x|; -inf for zero.
  value_type log_mag() const noexcept { return log_mag_; }
  bool is_zero() const noexcept { return sign_ == 0; }

  value_type value() const noexcept { return sign_ == 0 ? 0 : sign_ * std::exp(log_mag_); }
  double to_double() const noexcept { return static_cast<double>(value()); }
  explicit operator double() const noexcept { return to_double(); }

  /// log10|x|, handy for order-of-magnitude reporting.
  value_type log10_mag() const noexcept { return log_mag_ / std::numbers::ln10_v<value_type>; }

  LogReal abs() const noexcept { return from_log(log_mag_, sign_ == 0 ? 0 : 1); }

  LogReal operator-() const noexcept {
    LogReal r = *this;
    r.sign_ = -r.sign_;
    return r;
  }

  friend LogReal operator*(const LogReal& a, const LogReal& b) noexcept {
    if (a.is_zero() || b.is_zero()) return {};
    return from_log(a.log_mag_ + b.log_mag_, a.sign_ * b.sign_);
  }

  friend LogReal operator/(const LogReal& a, const LogReal& b) noexcept {
    if (b.is_zero()) {
      return from_log(std::numeric_limits<value_type>::infinity(), a.sign_ == 0 ? 1 : a.sign_);
    }
    if (a.is_zero()) return {};
    return from_log(a.log_mag_ - b.log_mag_, a.sign_ * b.sign_);
  }

  friend LogReal operator+(const LogReal& a, const LogReal& b) noexcept {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const LogReal& big = a.log_mag_ >= b.log_mag_ ? a : b;
    const LogReal& small = a.log_mag_ >= b.log_mag_ ? b : a;
    const value_type d = std::exp(small.log_mag_ - big.log_mag_);
    if (big.sign_ == small.sign_) return from_log(big.log_mag_ + std::log1p(d), big.sign_);
    if (d == 1) return {};
    return from_log(big.log_mag_ + std::log1p(-d), big.sign_);
  }

  friend LogReal operator-(const LogReal& a, const LogReal& b) noexcept { return a + (-b); }

  LogReal& operator*=(const LogReal& o) noexcept { return *this = *this * o; }
  LogReal& operator/=(const LogReal& o) noexcept { return *this = *this / o; }
  LogReal& operator+=(const LogReal& o) noexcept { return *this = *this + o; }
  LogReal& operator-=(const LogReal& o) noexcept { return *this = *this - o; }

  friend bool operator==(const LogReal& a, const LogReal& b) noexcept {
    return a.sign_ == b.sign_ && (a.sign_ == 0 || a.log_mag_ == b.log_mag_);
  }

  friend std::partial_ordering operator<=>(const LogReal& a, const LogReal& b) noexcept {
    if (a.sign_ != b.sign_) return a.sign_ <=> b.sign_;
    if (a.sign_ == 0) return std::partial_ordering::equivalent;
    return a.sign_ > 0 ? a.log_mag_ <=> b.log_mag_ : b.log_mag_ <=> a.log_mag_;
  }

  friend std::ostream& operator<<(std::ostream& os, const LogReal& x) {
    if (x.sign_ == 0) return os << "0";
    return os << (x.sign_ < 0 ? "-" : "") << "exp(" << static_cast<double>(x.log_mag_) << ")";
  }

 private:
  int sign_ = 0;
  value_type log_mag_ = -std::numeric_limits<value_type>::infinity();
};

/// |x|^p for a nonnegative-magnitude power; the sign is kept only for integer p.
inline LogReal pow(const LogReal& x, long double p) noexcept {
  if (p == 0) return LogReal::one();
  if (x.is_zero()) return {};
  int sign = 1;
  if (x.sign() < 0 && std::fmod(p, 2.0L) != 0) sign = -1;
  return LogReal::from_log(x.log_mag() * p, sign);
}

inline LogReal sqrt(const LogReal& x) noexcept {
  if (x.is_zero()) return {};
  return LogReal::from_log(x.log_mag() / 2, 1);
}

namespace detail {

inline constexpr std::size_t kFactorialTableSize = 1u << 15;

// ln(n!) for n < kFactorialTableSize by compensated running sum of ln i.
inline const std::vector<long double>& log_factorial_table() {
  static const std::vector<long double> table = [] {
    std::vector<long double> t(kFactorialTableSize);
    long double sum = 0, comp = 0;
    t[0] = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      const long double term = std::log(static_cast<long double>(i));
      const long double next = sum + term;
      if (std::fabs(sum) >= std::fabs(term)) {
        comp += (sum - next) + term;
      } else {
        comp += (term - next) + sum;
      }
      sum = next;
      t[i] = sum + comp;
    }
    return t;
  }();
  return table;
}

inline long double log_factorial_raw(std::uint64_t n) {
  const auto& table = log_factorial_table();
  if (n < table.size()) return table[n];
  // Stirling series; the truncation error is below 1e-24 for n >= 2^15.
  const long double x = static_cast<long double>(n);
  const long double inv = 1.0L / x;
  const long double inv2 = inv * inv;
  return x * std::log(x) - x + 0.5L * std::log(2.0L * std::numbers::pi_v<long double> * x) +
         inv * (1.0L / 12 - inv2 * (1.0L / 360 - inv2 * (1.0L / 1260 - inv2 / 1680)));
}

}  // namespace detail

/// ln(n!) as a positive LogReal.
inline LogReal log_factorial(std::uint64_t n) { return LogReal::from_log(detail::log_factorial_raw(n)); }

/// Binomial coefficient C(n, k); zero when k > n.
inline LogReal binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return {};
  return LogReal::from_log(detail::log_factorial_raw(n) - detail::log_factorial_raw(k) -
                           detail::log_factorial_raw(n - k));
}

}  // namespace cathub
