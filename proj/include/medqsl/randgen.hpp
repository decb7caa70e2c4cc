#pragma once

#include <cstdint>

#include "medqsl/hamiltonian.hpp"
#include "medqsl/state.hpp"

namespace medqsl {

/// Counter-based stream: draw k of (seed, stream_id) is a fixed hash of
/// (seed, stream_id, k), so results do not depend on scheduling or platform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Complex normal with E|z|^2 = 1.
  cplx complex_normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class HermitianEnsemble {
  Gue,      // (G + G^dagger)/2, complex Ginibre G
  Uniform,  // entries uniform in the unit square, Hermitised
};

enum class DensityEnsemble {
  HilbertSchmidt,  // G G^dagger / tr, square Ginibre G
  Pure,            // Haar-random pure state
};

Vector haar_vector(int dim, RngStream& rng);
DensityState haar_pure(int dim, RngStream& rng);
DensityState haar_pure(const SystemLayout& layout, RngStream& rng);

DensityState random_density(int dim, RngStream& rng);
DensityState random_density(const SystemLayout& layout, RngStream& rng,
                            DensityEnsemble ensemble = DensityEnsemble::HilbertSchmidt);

Matrix random_hermitian(int dim, RngStream& rng, HermitianEnsemble ensemble = HermitianEnsemble::Gue);

/// H_AC (x) I_B + I_A (x) H_BC on layout A,B,C. With d_c = 1 the mediator
/// disappears and the result is H_A (x) I + I (x) H_B on layout A,B.
Hamiltonian random_mediated_hamiltonian(int d_a, int d_b, int d_c, RngStream& rng,
                                        HermitianEnsemble ensemble = HermitianEnsemble::Gue);

}  // namespace medqsl
