#include <doctest.h>

#include <cmath>
#include <numbers>

#include "medqsl/dynamics.hpp"
#include "medqsl/qsl.hpp"
#include "medqsl/randgen.hpp"
#include "oracles.hpp"

using namespace medqsl;

namespace {

const Bipartition kAB{{"A"}, {"B"}};

/// Closed form for direct_optimal(d) from |00>: cos T |00> + i sin T |Phi'>.
double direct_negativity(int d, double t) {
  const double s = std::abs(std::cos(t)) + std::sqrt(d - 1.0) * std::abs(std::sin(t));
  return (s * s - 1) / 2;
}

ObserveConfig with_target(DensityState target, Bipartition p = kAB) {
  ObserveConfig c;
  c.bipartition = std::move(p);
  c.target = std::move(target);
  return c;
}

}  // namespace

TEST_CASE("time grids") {
  const TimeGrid g = TimeGrid::uniform(0, 1, 4);
  CHECK(g.size() == 5);
  CHECK(g.at(4) == 1.0);
  CHECK(TimeGrid::make(0, 1, 0.25).size() == 5);
  CHECK_THROWS_AS(TimeGrid::make(1, 0, 0.1), Error);
  CHECK_THROWS_AS(TimeGrid::make(0, 1, 0), Error);
  CHECK_THROWS_AS(TimeGrid::uniform(0, 1, 0), Error);
}

TEST_CASE("direct optimal reaches the Bell state at pi/4") {
  const Hamiltonian h = direct_optimal(2);
  const DensityState s0 = DensityState::basis(h.layout(), {0, 0});
  const TimeGrid grid = TimeGrid::uniform(0, std::numbers::pi / 4, 100);
  ObserveConfig cfg = with_target(maximally_entangled(2, h.layout()));
  cfg.marginal = std::vector<std::string>{"A"};
  const Trajectory tr = evolve_unitary(h, s0, grid, cfg);
  const Observables& end = tr.observables.back();
  CHECK(std::abs(end.fidelity_to_target - 1) < 1e-10);
  CHECK(std::abs(end.negativity - 0.5) < 1e-10);
  CHECK(std::abs(end.purity_marginal - 0.5) < 1e-10);
  CHECK(std::abs(end.mutual_information - 2) < 1e-8);
  // T = 0 is the initial state itself.
  CHECK((tr.states.front().matrix() - s0.matrix()).norm() == 0.0);
  CHECK(tr.observables.front().negativity == 0.0);
  // Energy is conserved.
  for (const auto& o : tr.observables) {
    CHECK(std::abs(o.mean_energy - 1) < 1e-10);
    CHECK(std::abs(o.energy_std - 1) < 1e-10);
  }
}

TEST_CASE("direct optimal against closed form and a Taylor propagator") {
  for (int d = 2; d <= 5; ++d) {
    const Hamiltonian h = direct_optimal(d);
    const DensityState s0 = DensityState::basis(h.layout(), {0, 0});
    const UnitaryPropagator prop(h, s0);
    for (double t : {0.1, 0.5, 0.9553, 1.3, 2.0}) {
      const DensityState s = prop.state_at(t);
      CHECK(std::abs(negativity(s, kAB) - direct_negativity(d, t)) < 1e-10);
      const oracle::Matrix u = oracle::expm_taylor(-std::complex<double>(0, 1) * t * h.matrix());
      const oracle::Vector psi = u.col(0);
      CHECK((s.matrix() - psi * psi.adjoint()).norm() < 1e-10);
      CHECK(std::abs(negativity(s, kAB) - oracle::schmidt_negativity(psi, d, d)) < 1e-10);
      // Geodesic: the Bures angle from |00> equals T while T <= pi/2.
      if (t <= std::numbers::pi / 2) CHECK(std::abs(bures_angle(s, s0) - t) < 1e-8);
    }
    const auto first = first_max_entanglement_time(h, s0, kAB, d, 3.0);
    REQUIRE(first.has_value());
    CHECK(std::abs(*first - std::acos(1 / std::sqrt(double(d)))) < 1e-7);
    CHECK(std::abs(*first - di_bound(d)) < 1e-7);
  }
}

TEST_CASE("commuting evolution of a product state never entangles") {
  const Hamiltonian h = commuting_mediated(ops::pauli_z(), ops::pauli_z(), ops::pauli_z());
  oracle::Vector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  oracle::Vector zero(2);
  zero << 1, 0;
  const DensityState s0 = DensityState::from_pure(h.layout(), oracle::naive_kron(oracle::naive_kron(plus, plus), zero));
  CHECK_FALSE(first_max_entanglement_time(h, s0, kAB, 2, 5.0).has_value());
}

TEST_CASE("unitary evolution preserves the spectrum and respects Mandelstam-Tamm") {
  oracle::Rng rng(40);
  const SystemLayout l = SystemLayout::uniform({"A", "B"}, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const Hamiltonian h(l, rng.hermitian(4));
    const DensityState mixed = DensityState::from_matrix(l, rng.rho(4));
    const UnitaryPropagator prop(h, mixed);
    const auto before = oracle::min_eigenvalue(mixed.matrix());
    const DensityState later = prop.state_at(0.7 + trial * 0.05);
    CHECK(std::abs(oracle::min_eigenvalue(later.matrix()) - before) < 1e-10);
    CHECK(std::abs(later.matrix().trace().real() - 1) < 1e-12);

    const DensityState pure = DensityState::from_pure(l, rng.ket(4));
    const double sd = energy_moments(h, pure).std_dev;
    const UnitaryPropagator pp(h, pure);
    for (double t = 0.05; t < 2; t += 0.15) {
      const double theta = bures_angle(pp.state_at(t), pure);
      CHECK(theta <= sd * t + 1e-9);
    }
  }
}

TEST_CASE("no maximal entanglement before the direct-interaction bound") {
  for (int d = 2; d <= 3; ++d) {
    const SystemLayout l = SystemLayout::uniform({"A", "B"}, d);
    for (std::uint64_t i = 0; i < 60; ++i) {
      RngStream rng(7, i);
      const DensityState s0 = tensor_product(haar_pure(SystemLayout::uniform({"A"}, d), rng),
                                             haar_pure(SystemLayout::uniform({"B"}, d), rng));
      const auto scaled = resource_equality_scale(Hamiltonian(l, random_hermitian(d * d, rng)), s0);
      const UnitaryPropagator prop(scaled.hamiltonian, s0);
      const double limit = di_bound(d) - 1e-6;
      for (double t = 0; t < limit; t += 0.01) CHECK(negativity(prop.state_at(t), kAB) < 0.5 * (d - 1) - 1e-7);
    }
  }
}

TEST_CASE("Lindblad without jumps agrees with unitary evolution") {
  oracle::Rng rng(41);
  const SystemLayout l = SystemLayout::uniform({"A", "B"}, 2);
  const Hamiltonian h(l, rng.hermitian(4));
  const DensityState s0 = DensityState::from_matrix(l, rng.rho(4, 2));
  const TimeGrid grid = TimeGrid::uniform(0, 1, 10);
  const Trajectory a = evolve_unitary(h, s0, grid, ObserveConfig{});
  const Trajectory b = evolve_lindblad(h, JumpOperatorSet{}, s0, grid, ObserveConfig{});
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK((a.states[k].matrix() - b.states[k].matrix()).norm() < 1e-10);
}

TEST_CASE("dephasing decays coherences at rate 2 gamma") {
  const SystemLayout l = SystemLayout::uniform({"A", "B"}, 2);
  const Hamiltonian h(l, Matrix::Zero(4, 4));
  oracle::Vector psi = oracle::Vector::Zero(4);
  psi(0) = psi(2) = 1 / std::sqrt(2.0);  // |+>|0>
  const DensityState s0 = DensityState::from_pure(l, psi);
  const double gamma = 0.3;
  const auto jumps = JumpOperatorSet::local_dephasing(l, {"A"}, gamma);
  const TimeGrid grid = TimeGrid::uniform(0, 2, 8);
  const Trajectory tr = evolve_lindblad(h, jumps, s0, grid, ObserveConfig{});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Matrix rho_a = partial_trace(tr.states[k], {"A"}).matrix();
    CHECK(std::abs(rho_a(0, 1).real() - 0.5 * std::exp(-2 * gamma * grid.at(k))) < 1e-10);
    CHECK(std::abs(rho_a(0, 0).real() - 0.5) < 1e-12);
  }
}

TEST_CASE("Lindblad dynamics preserve trace and converge under step halving") {
  oracle::Rng rng(42);
  const SystemLayout l = SystemLayout::uniform({"A", "B", "C"}, 2);
  const Hamiltonian h(l, rng.hermitian(8));
  const DensityState s0 = DensityState::from_matrix(l, rng.rho(8, 3));
  JumpOperatorSet jumps = JumpOperatorSet::local_damping(l, {"A", "B", "C"}, 0.2);
  for (const auto& [label, ops_list] : JumpOperatorSet::local_dephasing(l, {"C"}, 0.1).operators)
    for (const auto& op : ops_list) jumps.add(label, op);
  const TimeGrid grid = TimeGrid::uniform(0, 1, 4);
  const Trajectory coarse = evolve_lindblad(h, jumps, s0, grid, ObserveConfig{});
  const Trajectory fine = evolve_lindblad(h, jumps, s0, grid, ObserveConfig{}, LindbladOptions{5e-4, 1e-6});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(std::abs(coarse.states[k].matrix().trace() - std::complex<double>(1)) < 1e-10);
    CHECK((coarse.states[k].matrix() - fine.states[k].matrix()).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(oracle::min_eigenvalue(coarse.states[k].matrix()) > -1e-10);
  }
}

TEST_CASE("entanglement change at zero") {
  const Hamiltonian h = direct_optimal(2);
  const DensityState s0 = DensityState::basis(h.layout(), {0, 0});
  for (double delta : {1e-6, 1e-4, 1e-3}) {
    const double dn = entanglement_change_at_zero(h, JumpOperatorSet{}, s0, kAB, delta);
    CHECK(std::abs(dn - std::sin(2 * delta) / 2) < 1e-12);
  }
  CHECK_THROWS_AS(entanglement_change_at_zero(h, JumpOperatorSet{}, s0, kAB, 1e-2), Error);
}

TEST_CASE("explicit integration with an oversized step reports lost positivity") {
  const SystemLayout l = SystemLayout::uniform({"A", "B"}, 2);
  const Hamiltonian h = direct_optimal(2);
  const DensityState s0 = DensityState::basis(l, {1, 1});
  const auto jumps = JumpOperatorSet::local_damping(l, {"A", "B"}, 50.0);
  try {
    evolve_lindblad(h, jumps, s0, TimeGrid::uniform(0, 1, 2), ObserveConfig{}, LindbladOptions{0.5, 1e-6});
    FAIL("expected PositivityLost");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PositivityLost);
  }
}
