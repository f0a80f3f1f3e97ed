#pragma once

#include <stdexcept>
#include <string>

namespace cscat {

enum class ErrorKind {
  invalid_geometry,
  asymmetric_potential,
  unsupported_energy,
  opacity_overflow,
  degenerate_odd_solution,
  spectrum_domain,
  stale_cache,
  domain_too_small,
  discretization,
  empty_channel,
  extrapolation_failure,
  derivative_failure,
  node_proximity,
  integration_failure,
  bracket,
  schema_violation,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cscat
