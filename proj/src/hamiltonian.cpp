#include "medqsl/hamiltonian.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace medqsl {

using namespace std::complex_literals;

namespace ops {

Matrix identity(int d) { return Matrix::Identity(d, d); }

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, -1i, 1i, 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

namespace {
void check_level(int d, int j) {
  if (d < 2) throw Error(ErrorKind::BadDimension, "operator dimension " + std::to_string(d));
  if (j < 0 || j >= d)
    throw Error(ErrorKind::ArgOutOfRange,
                "level " + std::to_string(j) + " outside dimension " + std::to_string(d));
}
}  // namespace

Matrix gx(int d, int j) {
  check_level(d, j);
  Matrix m = Matrix::Zero(d, d);
  m(0, j) += 1.0;
  m(j, 0) += 1.0;
  return m;
}

Matrix gy(int d, int j) {
  check_level(d, j);
  Matrix m = Matrix::Zero(d, d);
  m(0, j) += -1i;
  m(j, 0) += 1i;
  return m;
}

Matrix projector(int d, int j) {
  check_level(d, j);
  Matrix m = Matrix::Zero(d, d);
  m(j, j) = 1.0;
  return m;
}

}  // namespace ops

Hamiltonian::Hamiltonian(SystemLayout layout, Matrix matrix, std::string label)
    : layout_(std::move(layout)), matrix_(std::move(matrix)), label_(std::move(label)) {
  if (matrix_.rows() != layout_.total_dim() || matrix_.cols() != layout_.total_dim())
    throw Error(ErrorKind::DimensionMismatch, "Hamiltonian does not match layout " + to_string(layout_));
  require_hermitian(matrix_, "Hamiltonian");
  matrix_ = hermitian_part(matrix_);
}

Hamiltonian Hamiltonian::scaled(double k) const {
  return Hamiltonian(layout_, k * matrix_, label_);
}

EnergyMoments energy_moments(const Matrix& h, double ground_energy, const DensityState& s) {
  if (h.rows() != s.dim())
    throw Error(ErrorKind::LayoutMismatch, "Hamiltonian and state dimensions differ");
  // The spread is taken from the centred operator A = H - <H>, never as
  // <H^2> - <H>^2, so eigenstates give dM at roundoff rather than sqrt(eps).
  double mean = 0, spread = 0;
  if (const auto& psi = s.pure_vector()) {
    const Vector hpsi = h * *psi;
    mean = psi->dot(hpsi).real();
    spread = (hpsi - mean * *psi).norm();
  } else {
    mean = h.cwiseProduct(s.matrix().transpose()).sum().real();
    Matrix a = h;
    a.diagonal().array() -= mean;
    // tr(A^2 rho) = sum_ij A_ij (A rho)_ji
    const double variance = a.cwiseProduct((a * s.matrix()).transpose()).sum().real();
    if (variance > 1e-10) {
      spread = std::sqrt(variance);
    } else {
      // Near zero the sum above is dominated by cancellation; use rho = X X^dagger.
      // Populations at roundoff level are noise and would contribute sqrt(eps).
      const auto eig = hermitian_eig(s.matrix());
      const double floor = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, eig.eigenvalues.maxCoeff());
      const RealVector weights = (eig.eigenvalues.array() > floor).select(eig.eigenvalues, 0.0).cwiseSqrt();
      const Matrix x = eig.eigenvectors * weights.cast<cplx>().asDiagonal();
      spread = (a * x).norm();
    }
  }
  EnergyMoments out;
  out.ground_energy = ground_energy;
  out.mean_above_ground = std::max(0.0, mean - ground_energy);
  out.std_dev = spread;
  return out;
}

EnergyMoments energy_moments(const Hamiltonian& h, const DensityState& s) {
  if (!(h.layout() == s.layout()))
    throw Error(ErrorKind::LayoutMismatch,
                "Hamiltonian on " + to_string(h.layout()) + ", state on " + to_string(s.layout()));
  return energy_moments(h.matrix(), hermitian_eigenvalues(h.matrix())(0), s);
}

ScaledHamiltonian resource_equality_scale(const Hamiltonian& h, const DensityState& s) {
  const double resource = energy_moments(h, s).resource();
  if (!(resource > kStationaryTol))
    throw Error(ErrorKind::StationaryState,
                "min{<M>, dM} = " + std::to_string(resource) + "; the speed limit is vacuous");
  const double k = 1.0 / resource;
  return {h.scaled(k), k};
}

Hamiltonian direct_optimal(int d) {
  if (d < 2) throw Error(ErrorKind::BadDimension, "direct_optimal needs d >= 2, got " + std::to_string(d));
  const auto n = static_cast<Eigen::Index>(d) * d;
  Matrix m = Matrix::Zero(n, n);
  for (int j = 1; j < d; ++j) {
    const Matrix local = ops::gx(d, j) + ops::gy(d, j);
    m += kron(local, local);
  }
  m /= 2.0 * std::sqrt(static_cast<double>(d - 1));
  return Hamiltonian(SystemLayout::uniform({"A", "B"}, d), std::move(m),
                     "direct-optimal:" + std::to_string(d));
}

namespace {

SystemLayout three_qubits() { return SystemLayout::uniform({"A", "B", "C"}, 2); }

Matrix kron3(const Matrix& a, const Matrix& b, const Matrix& c) { return kron(kron(a, b), c); }

Vector ket(std::initializer_list<double> amplitudes) {
  Vector v(static_cast<Eigen::Index>(amplitudes.size()));
  Eigen::Index k = 0;
  for (double a : amplitudes) v(k++) = a;
  return v;
}

DensityState flagged_bell_mixture() {
  const double r = 1.0 / std::sqrt(2.0);
  const Vector plus = ket({r, r});
  const Vector minus = ket({r, -r});
  const Vector psi_m = (kron(plus, minus) + kron(minus, plus)) * r;
  const Vector psi_t = (kron(minus, minus) + kron(plus, plus)) * r;
  const Matrix flag0 = ops::projector(2, 0);
  const Matrix flag1 = ops::projector(2, 1);
  Matrix rho = 0.5 * kron(Matrix(psi_m * psi_m.adjoint()), flag0) +
               0.5 * kron(Matrix(psi_t * psi_t.adjoint()), flag1);
  return DensityState::from_matrix(three_qubits(), std::move(rho));
}

}  // namespace

ExamplePair cmi_product_example() {
  const Matrix i2 = ops::identity(2);
  Matrix m = (kron3(ops::pauli_x(), i2, ops::pauli_y()) + kron3(i2, ops::pauli_y(), ops::pauli_x())) /
             std::sqrt(2.0);
  return {Hamiltonian(three_qubits(), std::move(m), "cmi-product"),
          DensityState::basis(three_qubits(), {0, 0, 0})};
}

ExamplePair entangled_mediator_example() {
  const Matrix i2 = ops::identity(2);
  const Matrix x = ops::pauli_x(), y = ops::pauli_y(), z = ops::pauli_z();
  const Matrix h_c1 = -(i2 + x + y + z);
  const Matrix h_c2 = i2 - x - y + z;
  Matrix m = (kron3(z, i2, h_c1) + kron3(i2, z, h_c2)) / (2.0 * std::sqrt(2.0));
  Vector ghz = Vector::Zero(8);
  ghz(0) = ghz(7) = 1.0 / std::sqrt(2.0);
  return {Hamiltonian(three_qubits(), std::move(m), "cmi-entangled"),
          DensityState::from_pure(three_qubits(), std::move(ghz))};
}

ExamplePair classical_mediator_example() {
  const Matrix i2 = ops::identity(2), z = ops::pauli_z();
  Matrix m = 0.5 * (kron3(z, i2, z) + kron3(i2, z, z));
  return {Hamiltonian(three_qubits(), std::move(m), "cmi-classical"), flagged_bell_mixture()};
}

ExamplePair open_system_example() {
  const Matrix i2 = ops::identity(2), z = ops::pauli_z();
  return {Hamiltonian(three_qubits(), kron3(z, i2, z), "open-system"), flagged_bell_mixture()};
}

Hamiltonian commuting_mediated(const Matrix& h_a, const Matrix& h_b, const Matrix& h_c) {
  require_hermitian(h_a, "H_A");
  require_hermitian(h_b, "H_B");
  require_hermitian(h_c, "H_C");
  const auto da = static_cast<int>(h_a.rows()), db = static_cast<int>(h_b.rows());
  SystemLayout layout({{"A", da}, {"B", db}, {"C", static_cast<int>(h_c.rows())}});
  const Matrix ab = kron(h_a, ops::identity(db)) + kron(ops::identity(da), h_b);
  return Hamiltonian(std::move(layout), kron(ab, h_c), "commuting-mediated");
}

std::vector<std::string> builtin_example_names() {
  return {"direct-optimal", "cmi-product", "cmi-entangled", "cmi-classical", "open-system"};
}

ExamplePair builtin_example(std::string_view name) {
  if (name == "cmi-product") return cmi_product_example();
  if (name == "cmi-entangled") return entangled_mediator_example();
  if (name == "cmi-classical") return classical_mediator_example();
  if (name == "open-system") return open_system_example();
  constexpr std::string_view prefix = "direct-optimal";
  if (name.substr(0, prefix.size()) == prefix) {
    int d = 2;
    auto rest = name.substr(prefix.size());
    if (!rest.empty()) {
      if (rest.front() != ':') throw Error(ErrorKind::InvalidArgument, "unknown builtin '" + std::string(name) + "'");
      rest.remove_prefix(1);
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), d);
      if (ec != std::errc{} || ptr != rest.data() + rest.size())
        throw Error(ErrorKind::InvalidArgument, "bad dimension in '" + std::string(name) + "'");
    }
    Hamiltonian h = direct_optimal(d);
    DensityState s = DensityState::basis(h.layout(), {0, 0});
    return {std::move(h), std::move(s)};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown builtin example '" + std::string(name) + "'");
}

}  // namespace medqsl
