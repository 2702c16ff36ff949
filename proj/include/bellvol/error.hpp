#pragma once

#include <stdexcept>
#include <string>

namespace bellvol {

enum class ErrorKind {
  invalid_parameter,
  unsupported_for_mixed,
  unsupported_dimension,
  arity_mismatch,
  index_out_of_range,
  undefined_normalization,
  config_error,
};

/// Base exception for everything the library reports; `kind()` lets the CLI
/// map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bellvol
