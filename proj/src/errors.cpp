#include "medqsl/errors.hpp"

namespace medqsl {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BadDimension: return "BadDimension";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::FullOrEmptySet: return "FullOrEmptySet";
    case ErrorKind::PartitionMismatch: return "PartitionMismatch";
    case ErrorKind::LayoutMismatch: return "LayoutMismatch";
    case ErrorKind::StationaryState: return "StationaryState";
    case ErrorKind::PositivityLost: return "PositivityLost";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::ArgOutOfRange: return "ArgOutOfRange";
    case ErrorKind::PauliOnQudit: return "PauliOnQudit";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace medqsl
