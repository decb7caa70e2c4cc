#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medqsl/subsystems.hpp"
#include "medqsl/tensor.hpp"

namespace medqsl {

/// Ordered subsystems; the first listed is the most significant tensor index.
class SystemLayout {
 public:
  struct Subsystem {
    std::string label;
    int dim;
    bool operator==(const Subsystem&) const = default;
  };

  SystemLayout() = default;
  explicit SystemLayout(std::vector<Subsystem> subsystems);
  SystemLayout(std::initializer_list<Subsystem> subsystems)
      : SystemLayout(std::vector<Subsystem>(subsystems)) {}

  /// Labels with a common dimension, e.g. uniform({"A","B","C"}, 2).
  static SystemLayout uniform(const std::vector<std::string>& labels, int dim);

  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  std::size_t size() const { return subsystems_.size(); }
  Eigen::Index total_dim() const { return medqsl::total_dim(dims_); }
  const Dims& dims() const { return dims_; }
  std::vector<std::string> labels() const;

  bool contains(std::string_view label) const;
  /// Throws UnknownLabel.
  int position(std::string_view label) const;
  int dim(std::string_view label) const { return dims_[position(label)]; }

  /// Mask over positions; throws UnknownLabel for labels not in the layout.
  SubsystemMask mask(const std::vector<std::string>& labels) const;
  /// Subsystems selected by `labels`, kept in layout order.
  SystemLayout restricted(const std::vector<std::string>& labels) const;

  bool operator==(const SystemLayout&) const = default;

 private:
  std::vector<Subsystem> subsystems_;
  Dims dims_;
};

std::string to_string(const SystemLayout& layout);

/// Two disjoint, non-empty label groups.
struct Bipartition {
  std::vector<std::string> side_a;
  std::vector<std::string> side_b;

  /// "A:B", "A,B:C".
  static Bipartition parse(std::string_view text);
  std::vector<std::string> labels() const;
  bool operator==(const Bipartition&) const = default;
};

std::string to_string(const Bipartition& p);

/// Density matrix bound to a layout. Pure states keep their vector.
class DensityState {
 public:
  /// Validates Hermiticity, unit trace and positivity (tolerance 1e-10).
  static DensityState from_matrix(SystemLayout layout, Matrix rho);
  /// Normalises `psi`; throws InvalidArgument for a zero vector.
  static DensityState from_pure(SystemLayout layout, Vector psi);
  /// Computational basis state; one digit per subsystem.
  static DensityState basis(SystemLayout layout, const std::vector<int>& digits);
  /// Skips validation; for states produced by trusted kernels.
  static DensityState unchecked(SystemLayout layout, Matrix rho,
                                std::optional<Vector> psi = std::nullopt);

  const SystemLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return rho_; }
  const std::optional<Vector>& pure_vector() const { return psi_; }
  Eigen::Index dim() const { return rho_.rows(); }

 private:
  DensityState(SystemLayout layout, Matrix rho, std::optional<Vector> psi)
      : layout_(std::move(layout)), rho_(std::move(rho)), psi_(std::move(psi)) {}

  SystemLayout layout_;
  Matrix rho_;
  std::optional<Vector> psi_;
};

/// Checks the density-state invariants, returning a description of the first
/// violation or nullopt.
std::optional<std::string> check_density_invariants(const DensityState& s, double tol = 1e-10);

DensityState tensor_product(const DensityState& a, const DensityState& b);

/// (1/sqrt d) sum_j |j>|j> on a two-subsystem layout with both dims equal to d.
DensityState maximally_entangled(int d, const SystemLayout& layout);

DensityState partial_trace(const DensityState& s, const std::vector<std::string>& keep);
Matrix partial_transpose(const DensityState& s, const std::vector<std::string>& transposed);

/// Sum of |negative eigenvalues| of the partial transpose; `p` must cover the layout.
double negativity(const DensityState& s, const Bipartition& p);
/// Negativity after tracing out every subsystem not named in `p`.
double negativity_of_marginal(const DensityState& s, const Bipartition& p);
/// Negativity of a bipartite matrix with the given factor dimensions.
double negativity(const Matrix& rho, int dim_a, int dim_b);

double uhlmann_fidelity(const DensityState& rho, const DensityState& sigma);
double bures_angle(const DensityState& rho, const DensityState& sigma);

/// Bits.
double von_neumann_entropy(const DensityState& s);
double von_neumann_entropy(const Matrix& rho);
double mutual_information(const DensityState& s, const Bipartition& p);
double purity(const DensityState& s);
/// Entanglement entropy S(rho_A) of the marginal on p.labels(), defined only
/// when that marginal is pure (purity >= 1 - 1e-10); nullopt otherwise.
std::optional<double> pure_marginal_entanglement(const DensityState& s, const Bipartition& p);

bool is_classically_correlated_on(const DensityState& s, std::string_view mediator);

}  // namespace medqsl
