#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "medqsl/hamiltonian.hpp"
#include "medqsl/state.hpp"

namespace medqsl {

/// Points start, start+step, ... up to stop (inclusive when stop lies on the lattice).
struct TimeGrid {
  double start = 0;
  double stop = 1;
  double step = 0.01;

  /// Validates start >= 0, stop > start, step > 0 and at most 1e7 intervals.
  static TimeGrid make(double start, double stop, double step);
  /// Exactly `intervals` equal steps, so both endpoints are grid points.
  static TimeGrid uniform(double start, double stop, std::size_t intervals);

  std::size_t size() const;
  double at(std::size_t k) const;
  std::vector<double> points() const;
};

/// Which observables a trajectory records. Subsystems outside the
/// bipartition are traced out before negativity and mutual information.
struct ObserveConfig {
  Bipartition bipartition{{"A"}, {"B"}};
  std::optional<DensityState> target;
  /// Marginal whose purity is recorded; defaults to the bipartition's labels.
  std::optional<std::vector<std::string>> marginal;
  bool keep_states = true;
};

struct Observables {
  double negativity = 0;
  double fidelity_to_target = 0;  // NaN without a target
  double bures_angle_from_initial = 0;
  double purity_marginal = 0;
  double mutual_information = 0;
  double mean_energy = 0;
  double energy_std = 0;
};

struct Trajectory {
  TimeGrid grid;
  std::vector<double> times;
  std::vector<DensityState> states;  // empty unless keep_states
  std::vector<Observables> observables;
};

/// rho(T) = U rho(0) U^dagger from one eigendecomposition of the generator.
/// Mixed states are carried as a low-rank factor X with rho = X X^dagger.
class UnitaryPropagator {
 public:
  UnitaryPropagator(const Hamiltonian& h, const DensityState& s0);

  double ground_energy() const { return spectrum_.eigenvalues(0); }
  const EigDecomposition<cplx>& spectrum() const { return spectrum_; }
  const DensityState& initial() const { return s0_; }

  DensityState state_at(double t) const;
  /// Reduced state on the subsystems selected by `keep`.
  Matrix marginal_at(double t, const SubsystemMask& keep) const;

 private:
  Matrix factor_at(double t) const;

  DensityState s0_;
  EigDecomposition<cplx> spectrum_;
  Matrix eigen_factor_;  // V^dagger X(0)
};

/// Jump operators Q^X_k, each acting on a single subsystem.
struct JumpOperatorSet {
  std::map<std::string, std::vector<Matrix>> operators;

  bool empty() const;
  void add(const std::string& label, Matrix op);

  /// sqrt(gamma) Z per subsystem; on qudits Z generalises to diag(1 - 2j/(d-1)).
  static JumpOperatorSet local_dephasing(const SystemLayout& layout,
                                         const std::vector<std::string>& labels, double gamma);
  /// sqrt(gamma) sum_j |j-1><j| per subsystem (|0><1| on a qubit).
  static JumpOperatorSet local_damping(const SystemLayout& layout,
                                       const std::vector<std::string>& labels, double gamma);
};

struct LindbladOptions {
  double max_step = 1e-3;
  double positivity_tol = 1e-6;
};

/// d rho/dT = -i[M, rho] + sum_k (Q rho Q^dagger - {Q^dagger Q, rho}/2), fixed-step RK4.
class LindbladPropagator {
 public:
  LindbladPropagator(const Hamiltonian& h, const JumpOperatorSet& jumps, LindbladOptions options = {});

  /// Integrates rho from t0 to t1 with equal substeps no longer than max_step.
  Matrix advance(const Matrix& rho, double t0, double t1) const;
  Matrix derivative(const Matrix& rho) const;

 private:
  Matrix effective_;  // M - (i/2) sum Q^dagger Q
  std::vector<Matrix> jumps_;
  LindbladOptions options_;
};

Observables observe(const DensityState& s, const DensityState& s0, const Matrix& h,
                    double ground_energy, const ObserveConfig& config);

Trajectory evolve_unitary(const Hamiltonian& h, const DensityState& s0, const TimeGrid& grid,
                          const ObserveConfig& config);

/// Throws PositivityLost when an eigenvalue drops below -options.positivity_tol.
Trajectory evolve_lindblad(const Hamiltonian& h, const JumpOperatorSet& jumps, const DensityState& s0,
                           const TimeGrid& grid, const ObserveConfig& config,
                           LindbladOptions options = {});

/// N(delta) - N(0) on the bipartition; delta must lie in [1e-6, 1e-3].
double entanglement_change_at_zero(const Hamiltonian& h, const JumpOperatorSet& jumps,
                                   const DensityState& s0, const Bipartition& p, double delta);

/// Earliest time at which the negativity on `p` reaches (d-1)/2 - 1e-7, located
/// at the peak of the first bump that crosses it. Grid scan at 1e-3 followed by
/// golden-section refinement to 1e-9. nullopt when the horizon (<= 50) is exhausted.
std::optional<double> first_max_entanglement_time(const Hamiltonian& h, const DensityState& s0,
                                                  const Bipartition& p, int d, double horizon);

/// Variant reusing an existing propagator.
std::optional<double> first_max_entanglement_time(const UnitaryPropagator& propagator,
                                                  const Bipartition& p, int d, double horizon);

}  // namespace medqsl
