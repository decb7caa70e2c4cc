#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "medqsl/randgen.hpp"
#include "oracles.hpp"

using namespace medqsl;

TEST_CASE("streams are deterministic and independent") {
  RngStream a(1, 5), b(1, 5), c(1, 6), e(2, 5);
  std::vector<std::uint64_t> va, vb;
  for (int k = 0; k < 100; ++k) {
    va.push_back(a.next_u64());
    vb.push_back(b.next_u64());
  }
  CHECK(va == vb);
  CHECK(a.draws() == 100);
  CHECK(c.next_u64() != va.front());
  CHECK(e.next_u64() != va.front());
  for (int k = 0; k < 10000; ++k) {
    const double u = c.uniform();
    CHECK((u > 0 && u < 1));
  }
}

TEST_CASE("normal draws have unit variance") {
  RngStream rng(3, 0);
  double sum = 0, sq = 0, csq = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
    csq += std::norm(rng.complex_normal());
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1) < 0.01);
  CHECK(std::abs(csq / n - 1) < 0.01);
}

TEST_CASE("Haar overlaps follow Beta(1, d - 1)") {
  // |<0|psi>|^2 for Haar psi in C^d has CDF 1 - (1 - x)^(d-1).
  for (int d : {2, 3, 4}) {
    RngStream rng(11, d);
    const int n = 100000;
    std::vector<double> x(n);
    double mean = 0;
    for (int k = 0; k < n; ++k) {
      x[k] = std::norm(haar_vector(d, rng)(0));
      mean += x[k] / n;
    }
    CHECK(std::abs(mean - 1.0 / d) < 0.005);
    std::sort(x.begin(), x.end());
    double ks = 0;
    for (int k = 0; k < n; ++k) {
      const double cdf = 1 - std::pow(1 - x[k], d - 1);
      ks = std::max({ks, std::abs(cdf - double(k) / n), std::abs(cdf - double(k + 1) / n)});
    }
    // 1% critical value 1.63 / sqrt(n).
    CHECK(ks < 1.63 / std::sqrt(double(n)));
  }
}

TEST_CASE("Hilbert-Schmidt density matrices") {
  RngStream rng(12, 0);
  double mean_purity = 0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const DensityState s = random_density(2, rng);
    CHECK(oracle::min_eigenvalue(s.matrix()) >= -1e-12);
    mean_purity += purity(s) / n;
  }
  // E[tr rho^2] = 2d / (d^2 + 1) for square Ginibre.
  CHECK(std::abs(mean_purity - 0.8) < 0.005);
  const auto layout = SystemLayout::uniform({"A", "B"}, 2);
  const DensityState pure = random_density(layout, rng, DensityEnsemble::Pure);
  CHECK(std::abs(purity(pure) - 1) < 1e-12);
  CHECK(pure.layout() == layout);
}

TEST_CASE("GUE and uniform Hermitian ensembles") {
  RngStream rng(13, 0);
  double tr_mean = 0, tr_sq = 0;
  const int n = 20000, dim = 3;
  for (int k = 0; k < n; ++k) {
    const Matrix h = random_hermitian(dim, rng);
    CHECK((h - h.adjoint()).norm() == 0.0);
    const double t = h.trace().real();
    tr_mean += t / n;
    tr_sq += t * t / n;
  }
  // Diagonal entries are real normals of variance 1/2 each.
  CHECK(std::abs(tr_mean) < 0.02);
  CHECK(std::abs(tr_sq - dim / 2.0) < 0.05);
  const Matrix u = random_hermitian(4, rng, HermitianEnsemble::Uniform);
  CHECK((u - u.adjoint()).norm() == 0.0);
}

TEST_CASE("random mediated Hamiltonian has no direct A-B term") {
  RngStream rng(14, 0);
  const Hamiltonian h = random_mediated_hamiltonian(2, 3, 2, rng);
  CHECK(h.layout().labels() == std::vector<std::string>{"A", "B", "C"});
  CHECK(h.layout().total_dim() == 12);
  // <a b c| H |a' b' c'> vanishes whenever both a != a' and b != b'.
  const std::vector<int> dims{2, 3, 2};
  for (long r = 0; r < 12; ++r)
    for (long c = 0; c < 12; ++c) {
      const auto dr = oracle::digits_of(r, dims), dc = oracle::digits_of(c, dims);
      if (dr[0] != dc[0] && dr[1] != dc[1]) CHECK(std::abs(h.matrix()(r, c)) == 0.0);
    }

  const Hamiltonian local = random_mediated_hamiltonian(2, 2, 1, rng);
  CHECK(local.layout().labels() == std::vector<std::string>{"A", "B"});
  for (long r = 0; r < 4; ++r)
    for (long c = 0; c < 4; ++c)
      if (r / 2 != c / 2 && r % 2 != c % 2) CHECK(std::abs(local.matrix()(r, c)) == 0.0);
}
