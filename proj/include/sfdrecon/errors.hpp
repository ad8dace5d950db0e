#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sfd {

// Invalid configuration or precondition violation supplied by a caller.
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A numerical procedure failed (non-convergence, tail bound, singular system).
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Picard iteration ran out of iterations; carries the residual history.
class VolterraNonConvergence : public NumericError {
public:
  VolterraNonConvergence(const std::string& msg, std::vector<double> residuals)
      : NumericError(msg), residual_history(std::move(residuals)) {}
  std::vector<double> residual_history;
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sfd
