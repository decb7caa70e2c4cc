#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace medqsl {

enum class ErrorKind {
  NotHermitian,
  NotPSD,
  DimensionMismatch,
  BadDimension,
  UnknownLabel,
  FullOrEmptySet,
  PartitionMismatch,
  LayoutMismatch,
  StationaryState,
  PositivityLost,
  InvalidArgument,
  SyntaxError,
  ArgOutOfRange,
  PauliOnQudit,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` carries the category.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace medqsl
