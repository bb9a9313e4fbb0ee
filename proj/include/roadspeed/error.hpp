#pragma once

#include <stdexcept>
#include <string>

namespace roadspeed {

/// Failure categories raised by the library. The CLI maps them onto exit codes.
enum class ErrorKind {
  invalid_parameter,
  invalid_grid,
  domain_too_small,
  domain,             // lambda outside the open interval where P(lambda) > 0
  subcritical_speed,  // c < c_K
  below_threshold,    // D <= threshold_D
  resolution,
  bracket_failure,
  instability,
  front_at_boundary,
  config,
  validation,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::invalid_grid: return "invalid-grid";
    case ErrorKind::domain_too_small: return "domain-too-small";
    case ErrorKind::domain: return "domain";
    case ErrorKind::subcritical_speed: return "subcritical-speed";
    case ErrorKind::below_threshold: return "below-threshold";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::bracket_failure: return "bracket-failure";
    case ErrorKind::instability: return "instability";
    case ErrorKind::front_at_boundary: return "front-reached-boundary";
    case ErrorKind::config: return "config";
    case ErrorKind::validation: return "validation";
  }
  return "unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + to_string(kind) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace roadspeed
