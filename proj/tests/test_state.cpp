#include <doctest.h>

#include <cmath>
#include <numbers>

#include "medqsl/hamiltonian.hpp"
#include "medqsl/state.hpp"
#include "oracles.hpp"

using namespace medqsl;

namespace {

SystemLayout qubits(std::initializer_list<std::string> labels) { return SystemLayout::uniform(labels, 2); }

DensityState pure(const SystemLayout& l, const Vector& v) { return DensityState::from_pure(l, v); }

DensityState mixed(const SystemLayout& l, const Matrix& m) { return DensityState::from_matrix(l, m); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::Io;
}

const Bipartition kAB{{"A"}, {"B"}};

}  // namespace

TEST_CASE("layout validation and index convention") {
  CHECK(kind_of([] { SystemLayout({{"A", 2}, {"A", 3}}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { SystemLayout({{"A", 1}}); }) == ErrorKind::BadDimension);
  const SystemLayout l({{"A", 2}, {"B", 3}});
  CHECK(l.total_dim() == 6);
  CHECK(to_string(l) == "[A:2,B:3]");
  CHECK(kind_of([&] { (void)l.position("Q"); }) == ErrorKind::UnknownLabel);
  // |1>_A |2>_B sits at 1*3 + 2.
  const DensityState s = DensityState::basis(l, {1, 2});
  CHECK(std::abs(s.matrix()(5, 5) - 1.0) < 1e-15);
}

TEST_CASE("bipartition parsing") {
  const Bipartition p = Bipartition::parse("A,B:C");
  CHECK(p.side_a == std::vector<std::string>{"A", "B"});
  CHECK(p.side_b == std::vector<std::string>{"C"});
  CHECK(to_string(p) == "A,B:C");
  CHECK_THROWS_AS(Bipartition::parse("A:A"), Error);
  CHECK_THROWS_AS(Bipartition::parse("A"), Error);
  CHECK_THROWS_AS(Bipartition::parse(":B"), Error);
}

TEST_CASE("density invariants") {
  oracle::Rng rng(10);
  const SystemLayout l = qubits({"A", "B"});
  CHECK_FALSE(check_density_invariants(mixed(l, rng.rho(4))).has_value());
  Matrix bad = rng.rho(4);
  bad(0, 0) += 0.1;
  CHECK(kind_of([&] { mixed(l, bad); }) == ErrorKind::InvalidArgument);
  Matrix negative = Matrix::Zero(4, 4);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK(kind_of([&] { mixed(l, negative); }) == ErrorKind::NotPSD);
  const DensityState p = pure(l, rng.ket(4) * 3.0);
  CHECK(std::abs(p.pure_vector()->norm() - 1) < 1e-12);
  CHECK_FALSE(check_density_invariants(p).has_value());
}

TEST_CASE("maximally entangled states") {
  const DensityState bell = maximally_entangled(2, qubits({"A", "B"}));
  CHECK(std::abs(bell.matrix()(0, 3) - 0.5) < 1e-15);
  const DensityState m3 = maximally_entangled(3, SystemLayout::uniform({"A", "B"}, 3));
  CHECK(std::abs(negativity(m3, kAB) - 1.0) < 1e-12);
  CHECK(std::abs(purity(m3) - 1.0) < 1e-12);
  CHECK_THROWS_AS(maximally_entangled(2, SystemLayout({{"A", 2}, {"B", 3}})), Error);
}

TEST_CASE("partial trace matches index-loop oracle") {
  oracle::Rng rng(11);
  const SystemLayout l({{"A", 2}, {"B", 3}, {"C", 2}});
  for (int trial = 0; trial < 20; ++trial) {
    const DensityState s = mixed(l, rng.rho(12));
    const std::vector<std::vector<std::string>> keeps = {{"A"}, {"B"}, {"C"}, {"A", "C"}, {"B", "C"}, {"A", "B"}};
    for (const auto& keep : keeps) {
      const Matrix ours = partial_trace(s, keep).matrix();
      const Matrix ref = oracle::naive_partial_trace(s.matrix(), {2, 3, 2}, l.mask(keep));
      CHECK((ours - ref).norm() < 1e-13);
    }
  }
  // Order of `keep` does not reorder subsystems.
  const DensityState s = mixed(l, rng.rho(12));
  CHECK((partial_trace(s, {"C", "A"}).matrix() - partial_trace(s, {"A", "C"}).matrix()).norm() == 0.0);
  CHECK(kind_of([&] { partial_trace(s, {"Z"}); }) == ErrorKind::UnknownLabel);
}

TEST_CASE("partial trace examples") {
  const DensityState bell = maximally_entangled(2, qubits({"A", "B"}));
  CHECK((partial_trace(bell, {"A"}).matrix() - Matrix::Identity(2, 2) / 2.0).norm() < 1e-15);
  oracle::Rng rng(12);
  const Matrix ra = rng.rho(2), rb = rng.rho(3);
  const DensityState prod = mixed(SystemLayout({{"A", 2}, {"B", 3}}), oracle::naive_kron(ra, rb));
  CHECK((partial_trace(prod, {"A"}).matrix() - ra).norm() < 1e-14);
  const DensityState ghz = entangled_mediator_example().state;
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = expected(3, 3) = 0.5;
  CHECK((partial_trace(ghz, {"A", "B"}).matrix() - expected).norm() < 1e-15);
}

TEST_CASE("partial transpose") {
  oracle::Rng rng(13);
  const SystemLayout l({{"A", 2}, {"B", 3}});
  const DensityState s = mixed(l, rng.rho(6));
  const Matrix pt = partial_transpose(s, {"B"});
  CHECK((pt - oracle::naive_partial_transpose(s.matrix(), {2, 3}, {false, true})).norm() == 0.0);
  const Matrix twice = partial_transpose(DensityState::unchecked(l, pt), {"B"});
  CHECK((twice - s.matrix()).norm() == 0.0);
  CHECK((pt - pt.adjoint()).norm() < 1e-15);
  CHECK(std::abs(pt.trace() - 1.0) < 1e-14);

  const DensityState bell = maximally_entangled(2, qubits({"A", "B"}));
  const Eigen::VectorXd ev = hermitian_eigenvalues(partial_transpose(bell, {"B"}));
  CHECK((ev - Eigen::Vector4d(-0.5, 0.5, 0.5, 0.5)).norm() < 1e-14);
  CHECK(kind_of([&] { partial_transpose(bell, {}); }) == ErrorKind::FullOrEmptySet);
  CHECK(kind_of([&] { partial_transpose(bell, {"A", "B"}); }) == ErrorKind::FullOrEmptySet);
  CHECK(kind_of([&] { partial_transpose(bell, {"C"}); }) == ErrorKind::UnknownLabel);
}

TEST_CASE("negativity examples") {
  const SystemLayout l = qubits({"A", "B"});
  CHECK(std::abs(negativity(maximally_entangled(2, l), kAB) - 0.5) < 1e-12);
  CHECK(negativity(DensityState::basis(l, {0, 0}), kAB) == 0.0);
  Vector v = Vector::Zero(4);
  v(0) = std::cos(std::numbers::pi / 8);
  v(3) = std::sin(std::numbers::pi / 8);
  CHECK(std::abs(negativity(pure(l, v), kAB) - 0.3535533906) < 1e-10);
  const DensityState ghz = entangled_mediator_example().state;
  CHECK(kind_of([&] { negativity(ghz, kAB); }) == ErrorKind::PartitionMismatch);
  CHECK(std::abs(negativity_of_marginal(ghz, kAB)) < 1e-15);
}

TEST_CASE("negativity properties on random states") {
  oracle::Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const int da = 2 + trial % 3, db = 2 + (trial / 3) % 3;
    const SystemLayout l({{"A", da}, {"B", db}});
    // Product states are PPT.
    const Matrix prod = oracle::naive_kron(rng.rho(da), rng.rho(db));
    CHECK(negativity(mixed(l, prod), kAB) == 0.0);
    // Schmidt cross-check on pure states.
    const Vector psi = rng.ket(da * db);
    const DensityState s = pure(l, psi);
    CHECK(std::abs(negativity(s, kAB) - oracle::schmidt_negativity(psi, da, db)) < 1e-10);
    // Local-unitary invariance on mixed states.
    const DensityState r = mixed(l, rng.rho(da * db, 2));
    const Matrix u = oracle::naive_kron(rng.unitary(da), rng.unitary(db));
    const DensityState rotated = mixed(l, u * r.matrix() * u.adjoint());
    CHECK(std::abs(negativity(rotated, kAB) - negativity(r, kAB)) < 1e-10);
    CHECK(std::abs(negativity(r, kAB) - oracle::negativity_by_definition(r.matrix(), da, db)) < 1e-10);
    CHECK(negativity(r, kAB) <= (std::min(da, db) - 1) / 2.0 + 1e-12);
  }
}

TEST_CASE("fidelity and Bures angle examples") {
  const SystemLayout one({{"A", 2}});
  const SystemLayout two = qubits({"A", "B"});
  oracle::Rng rng(15);
  const DensityState r = mixed(two, rng.rho(4));
  CHECK(std::abs(uhlmann_fidelity(r, r) - 1) < 1e-10);
  CHECK(std::abs(bures_angle(r, r)) < 1e-5);
  const DensityState z0 = DensityState::basis(one, {0}), z1 = DensityState::basis(one, {1});
  CHECK(uhlmann_fidelity(z0, z1) < 1e-15);
  CHECK(std::abs(bures_angle(z0, z1) - std::numbers::pi / 2) < 1e-14);
  const DensityState zz = DensityState::basis(two, {0, 0});
  const DensityState bell = maximally_entangled(2, two);
  CHECK(std::abs(uhlmann_fidelity(zz, bell) - 1 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(bures_angle(zz, bell) - std::numbers::pi / 4) < 1e-14);
  CHECK(kind_of([&] { uhlmann_fidelity(z0, zz); }) == ErrorKind::LayoutMismatch);
}

TEST_CASE("fidelity agrees with the two-square-root definition") {
  oracle::Rng rng(16);
  const SystemLayout l({{"A", 2}, {"B", 3}});
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix a = rng.rho(6, 1 + trial % 6), b = rng.rho(6, 1 + (trial / 6) % 6);
    const double f = uhlmann_fidelity(mixed(l, a), mixed(l, b));
    CHECK(std::abs(f - oracle::fidelity_by_definition(a, b)) < 1e-7);
    CHECK(std::abs(f - uhlmann_fidelity(mixed(l, b), mixed(l, a))) < 1e-10);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
  // Pure fast path matches the general path.
  for (int trial = 0; trial < 50; ++trial) {
    const Vector u = rng.ket(6), v = rng.ket(6);
    const double fast = uhlmann_fidelity(pure(l, u), pure(l, v));
    const double slow = uhlmann_fidelity(mixed(l, u * u.adjoint()), mixed(l, v * v.adjoint()));
    CHECK(std::abs(fast - std::abs(u.dot(v))) < 1e-14);
    CHECK(std::abs(fast - slow) < 1e-10);
  }
}

TEST_CASE("fidelity multiplicativity, monotonicity and Bures triangle inequality") {
  oracle::Rng rng(17);
  const SystemLayout ab = qubits({"A", "B"}), c({{"C", 2}}), abc = qubits({"A", "B", "C"});
  for (int trial = 0; trial < 200; ++trial) {
    const DensityState r1 = mixed(ab, rng.rho(4)), s1 = mixed(ab, rng.rho(4));
    const DensityState r2 = mixed(c, rng.rho(2)), s2 = mixed(c, rng.rho(2));
    const double joint = uhlmann_fidelity(tensor_product(r1, r2), tensor_product(s1, s2));
    CHECK(std::abs(joint - uhlmann_fidelity(r1, s1) * uhlmann_fidelity(r2, s2)) < 1e-9);

    const DensityState x = mixed(abc, rng.rho(8, 1 + trial % 8)), y = mixed(abc, rng.rho(8, 1 + trial % 5));
    CHECK(uhlmann_fidelity(x, y) <= uhlmann_fidelity(partial_trace(x, {"A", "B"}), partial_trace(y, {"A", "B"})) + 1e-10);

    const DensityState z = mixed(abc, rng.rho(8, 2));
    CHECK(bures_angle(x, z) <= bures_angle(x, y) + bures_angle(y, z) + 1e-9);
  }
}

TEST_CASE("entropy, mutual information and purity") {
  const SystemLayout q({{"A", 2}}), t({{"A", 3}});
  CHECK(std::abs(von_neumann_entropy(DensityState::basis(q, {1}))) < 1e-15);
  CHECK(std::abs(von_neumann_entropy(mixed(q, Matrix::Identity(2, 2) / 2.0)) - 1) < 1e-14);
  CHECK(std::abs(von_neumann_entropy(mixed(t, Matrix::Identity(3, 3) / 3.0)) - std::log2(3.0)) < 1e-14);

  const DensityState classical = classical_mediator_example().state;
  CHECK(std::abs(mutual_information(classical, Bipartition::parse("A,B:C")) - 1) < 1e-10);
  CHECK(std::abs(purity(partial_trace(classical, {"A", "B"})) - 0.5) < 1e-14);
  const SystemLayout ab = qubits({"A", "B"});
  CHECK(std::abs(mutual_information(maximally_entangled(2, ab), kAB) - 2) < 1e-12);
  oracle::Rng rng(18);
  const DensityState prod = mixed(ab, oracle::naive_kron(rng.rho(2), rng.rho(2)));
  CHECK(std::abs(mutual_information(prod, kAB)) < 1e-12);
  CHECK(std::abs(purity(DensityState::basis(ab, {0, 1})) - 1) < 1e-15);
  CHECK(std::abs(purity(mixed(q, Matrix::Identity(2, 2) / 2.0)) - 0.5) < 1e-15);
  CHECK(kind_of([&] { mutual_information(classical, kAB); }) == ErrorKind::PartitionMismatch);
}

TEST_CASE("entanglement entropy is defined only for pure marginals") {
  const DensityState bell = maximally_entangled(2, qubits({"A", "B"}));
  REQUIRE(pure_marginal_entanglement(bell, kAB).has_value());
  CHECK(std::abs(*pure_marginal_entanglement(bell, kAB) - 1) < 1e-12);
  CHECK_FALSE(pure_marginal_entanglement(classical_mediator_example().state, kAB).has_value());
  const DensityState product = DensityState::basis(qubits({"A", "B", "C"}), {0, 1, 0});
  CHECK(std::abs(*pure_marginal_entanglement(product, kAB)) < 1e-12);
}

TEST_CASE("classical correlation with the mediator") {
  CHECK(is_classically_correlated_on(classical_mediator_example().state, "C"));
  CHECK_FALSE(is_classically_correlated_on(entangled_mediator_example().state, "C"));
  oracle::Rng rng(19);
  const SystemLayout abc = qubits({"A", "B", "C"});
  for (int trial = 0; trial < 50; ++trial) {
    const DensityState prod = mixed(abc, oracle::naive_kron(rng.rho(4), rng.rho(2)));
    CHECK(is_classically_correlated_on(prod, "C"));
    // Mediator states mixed with a degenerate marginal but rotated flags.
    const Matrix u = rng.unitary(2);
    Matrix flags0 = Matrix::Zero(2, 2), flags1 = Matrix::Zero(2, 2);
    flags0(0, 0) = 1;
    flags1(1, 1) = 1;
    const Matrix cq = 0.5 * oracle::naive_kron(rng.rho(4), u * flags0 * u.adjoint()) +
                      0.5 * oracle::naive_kron(rng.rho(4), u * flags1 * u.adjoint());
    CHECK(is_classically_correlated_on(mixed(abc, cq), "C"));
    // Mediator listed first.
    const SystemLayout cab = qubits({"C", "A", "B"});
    const Matrix cq_first = 0.5 * oracle::naive_kron(u * flags0 * u.adjoint(), rng.rho(4)) +
                            0.5 * oracle::naive_kron(u * flags1 * u.adjoint(), rng.rho(4));
    CHECK(is_classically_correlated_on(mixed(cab, cq_first), "C"));
    const DensityState entangled = pure(abc, rng.ket(8));
    CHECK_FALSE(is_classically_correlated_on(entangled, "C"));
  }
  CHECK(kind_of([] { is_classically_correlated_on(classical_mediator_example().state, "D"); }) ==
        ErrorKind::UnknownLabel);
}
