#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace sphrec {

/// Invalid indices or arguments outside an operation's domain.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Mismatched dimensions or degree bounds between collaborating objects.
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

/// A triangular factor lost column rank at the configured tolerance.
struct RankError : std::runtime_error {
  RankError(const std::string& what, int order = -1)
      : std::runtime_error(what), order(order) {}
  int order;
};

/// Factorization of a system that should be positive definite failed.
struct SolverError : std::runtime_error {
  SolverError(const std::string& what, int order = -1)
      : std::runtime_error(what), order(order) {}
  int order;
};

/// Raised when an oracle is asked for indices it cannot represent exactly.
struct UnsupportedRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using WarningHandler = std::function<void(const std::string&)>;

// Non-fatal diagnostics (e.g. under-resolved quadrature). The default
// handler prints to stderr; tests install their own to capture messages.
void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace sphrec
