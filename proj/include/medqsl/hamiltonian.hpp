#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "medqsl/state.hpp"

namespace medqsl {

/// Single-subsystem operators used by the builtin examples and the .hspec grammar.
namespace ops {
Matrix identity(int d);
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
/// |0><j| + |j><0|
Matrix gx(int d, int j);
/// -i|0><j| + i|j><0|
Matrix gy(int d, int j);
/// |j><j|
Matrix projector(int d, int j);
}  // namespace ops

/// Hermitian generator in units of hbar*Omega, so times are dimensionless T = Omega t.
class Hamiltonian {
 public:
  /// Throws DimensionMismatch or NotHermitian.
  Hamiltonian(SystemLayout layout, Matrix matrix, std::string label = {});

  const SystemLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return matrix_; }
  const std::string& label() const { return label_; }

  Hamiltonian scaled(double k) const;

 private:
  SystemLayout layout_;
  Matrix matrix_;
  std::string label_;
};

struct EnergyMoments {
  double mean_above_ground = 0;  // <M> = tr(M rho) - E_g
  double std_dev = 0;            // Delta M
  double ground_energy = 0;      // E_g / (hbar Omega)

  double resource() const { return std::min(mean_above_ground, std_dev); }
};

EnergyMoments energy_moments(const Hamiltonian& h, const DensityState& s);
/// Same, with the ground energy already known.
EnergyMoments energy_moments(const Matrix& h, double ground_energy, const DensityState& s);

struct ScaledHamiltonian {
  Hamiltonian hamiltonian;
  double k;
};

/// Rescales h so that min{<M>, Delta M} = 1 on s. Throws StationaryState when
/// the resource is below 1e-12.
ScaledHamiltonian resource_equality_scale(const Hamiltonian& h, const DensityState& s);

inline constexpr double kStationaryTol = 1e-12;

/// (1/(2 sqrt(d-1))) sum_j (X^j + Y^j) (x) (X^j + Y^j) on A:d, B:d.
Hamiltonian direct_optimal(int d);

struct ExamplePair {
  Hamiltonian hamiltonian;
  DensityState state;
};

/// (X_A Y_C + Y_B X_C)/sqrt 2 with |000>.
ExamplePair cmi_product_example();
/// GHZ state with a mediator that is entangled with A and B.
ExamplePair entangled_mediator_example();
/// Bell-like AB mixture flagged by the mediator, H = (Z_A Z_C + Z_B Z_C)/2.
ExamplePair classical_mediator_example();
/// Same state as the classical-mediator example with H = Z_A Z_C.
ExamplePair open_system_example();

/// (H_A (x) I + I (x) H_B) (x) H_C on layout A,B,C.
Hamiltonian commuting_mediated(const Matrix& h_a, const Matrix& h_b, const Matrix& h_c);

/// Names accepted by `builtin_example`.
std::vector<std::string> builtin_example_names();
/// "direct-optimal:<d>" (pairs with |00>), "cmi-product", "cmi-entangled",
/// "cmi-classical", "open-system". Throws InvalidArgument for unknown names.
ExamplePair builtin_example(std::string_view name);

}  // namespace medqsl
