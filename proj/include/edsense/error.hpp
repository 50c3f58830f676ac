#pragma once

#include <stdexcept>
#include <string>

namespace edsense {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative or adaptive routine failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mixture-gamma construction produced an invalid term (non-positive or
/// non-finite weight) at a specific quadrature node.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, std::size_t node_index)
      : std::runtime_error(what), node_index_(node_index) {}

  [[nodiscard]] std::size_t node_index() const noexcept { return node_index_; }

 private:
  std::size_t node_index_;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edsense
