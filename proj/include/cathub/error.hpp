#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cathub {

/// Raised when an argument lies outside the physical domain of an operation
/// (y >= 1/2, negative squeezing, odd cat at beta = 0, ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a truncated Fock representation does not resolve the state.
/// `required_cutoff()` is the smallest index cutoff that would.
class truncation_error : public std::runtime_error {
 public:
  truncation_error(const std::string& what, std::size_t required)
      : std::runtime_error(what + " (required cutoff " + std::to_string(required) + ")"),
        required_(required) {}

  std::size_t required_cutoff() const noexcept { return required_; }

 private:
  std::size_t required_;
};

}  // namespace cathub
