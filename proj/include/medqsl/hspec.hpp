#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medqsl/hamiltonian.hpp"

namespace medqsl::hspec {

/// Diagnostic with a 1-based source position and a caret-marked excerpt.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, const std::string& message, int line, int column, std::string excerpt);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  /// Offending source line followed by a line with a caret under the column.
  const std::string& excerpt() const noexcept { return excerpt_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  int line_;
  int column_;
  std::string excerpt_;
};

struct SourcePos {
  int line = 1;
  int column = 1;
};

/// (-1)^negative * num / sqrt(root), or num when root is absent.
struct Coefficient {
  bool negative = false;
  double num = 1;
  std::optional<double> root;

  double value() const;
  bool operator==(const Coefficient&) const = default;
};

struct OpRef {
  std::string name;  // I, X, Y, Z, GX, GY, P
  std::string label;
  std::optional<int> arg;
  SourcePos pos;  // ignored by ==

  bool operator==(const OpRef& o) const { return name == o.name && label == o.label && arg == o.arg; }
};

struct Term {
  Coefficient coeff;
  std::vector<OpRef> factors;  // canonical: layout order, one per subsystem

  bool operator==(const Term&) const = default;
};

struct Ast {
  std::vector<SystemLayout::Subsystem> systems;
  std::vector<Term> terms;  // canonical order

  SystemLayout layout() const { return SystemLayout(systems); }
  bool operator==(const Ast&) const = default;
};

/// Parses and validates; the result is in canonical form. Inputs over 1 MiB
/// are rejected. Throws ParseError.
Ast parse(std::string_view text);

/// Dense matrix from kron products with identity fill, summed in canonical order.
Hamiltonian build(const Ast& ast, std::string label = "hspec");

/// Canonical rendering; parse(format(ast)) == ast.
std::string format(const Ast& ast);

/// The single-subsystem operator named by an OpRef.
Matrix operator_matrix(std::string_view name, int dim, std::optional<int> arg);

}  // namespace medqsl::hspec
