#include "medqsl/randgen.hpp"

#include <cmath>
#include <numbers>

namespace medqsl {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void require_dimension(int dim) {
  if (dim < 2) throw Error(ErrorKind::BadDimension, "random generation needs dim >= 2, got " + std::to_string(dim));
}

SystemLayout single(int dim) { return SystemLayout({{"S", dim}}); }

Matrix ginibre(int dim, RngStream& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.complex_normal();
  return g;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), key_(mix64(seed * kGolden + mix64(stream_id ^ 0x5851F42D4C957F2DULL))) {}

std::uint64_t RngStream::next_u64() { return mix64(key_ + (++counter_) * kGolden); }

double RngStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  return r * std::cos(2.0 * std::numbers::pi * uniform());
}

cplx RngStream::complex_normal() {
  const double r = std::sqrt(-std::log(uniform()));
  return std::polar(r, 2.0 * std::numbers::pi * uniform());
}

Vector haar_vector(int dim, RngStream& rng) {
  require_dimension(dim);
  Vector v(dim);
  for (int k = 0; k < dim; ++k) v(k) = rng.complex_normal();
  return v / v.norm();
}

DensityState haar_pure(int dim, RngStream& rng) { return haar_pure(single(dim), rng); }

DensityState haar_pure(const SystemLayout& layout, RngStream& rng) {
  return DensityState::from_pure(layout, haar_vector(static_cast<int>(layout.total_dim()), rng));
}

DensityState random_density(int dim, RngStream& rng) { return random_density(single(dim), rng); }

DensityState random_density(const SystemLayout& layout, RngStream& rng, DensityEnsemble ensemble) {
  const auto dim = static_cast<int>(layout.total_dim());
  if (ensemble == DensityEnsemble::Pure) return haar_pure(layout, rng);
  require_dimension(dim);
  const Matrix g = ginibre(dim, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityState::unchecked(layout, hermitian_part(rho));
}

Matrix random_hermitian(int dim, RngStream& rng, HermitianEnsemble ensemble) {
  require_dimension(dim);
  Matrix g(dim, dim);
  if (ensemble == HermitianEnsemble::Gue) {
    g = ginibre(dim, rng);
  } else {
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) g(i, j) = cplx(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
  }
  return (g + g.adjoint()) / 2.0;
}

Hamiltonian random_mediated_hamiltonian(int d_a, int d_b, int d_c, RngStream& rng,
                                        HermitianEnsemble ensemble) {
  require_dimension(d_a);
  require_dimension(d_b);
  if (d_c == 1) {
    const Dims dims{d_a, d_b};
    Matrix h = embed_operator(random_hermitian(d_a, rng, ensemble), dims, {0});
    h += embed_operator(random_hermitian(d_b, rng, ensemble), dims, {1});
    return Hamiltonian(SystemLayout({{"A", d_a}, {"B", d_b}}), std::move(h), "random-local");
  }
  require_dimension(d_c);
  const Dims dims{d_a, d_b, d_c};
  Matrix h = embed_operator(random_hermitian(d_a * d_c, rng, ensemble), dims, {0, 2});
  h += embed_operator(random_hermitian(d_b * d_c, rng, ensemble), dims, {1, 2});
  return Hamiltonian(SystemLayout({{"A", d_a}, {"B", d_b}, {"C", d_c}}), std::move(h), "random-mediated");
}

}  // namespace medqsl
