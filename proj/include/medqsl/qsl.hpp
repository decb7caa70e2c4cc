#pragma once

#include "medqsl/hamiltonian.hpp"
#include "medqsl/state.hpp"

namespace medqsl {

/// arccos(1/sqrt d): fastest entangling time with direct interactions.
double di_bound(int d);
/// 2 arccos(1/sqrt d): conjectured time with an uncorrelated mediator.
double conjecture_bound(int d);
/// arccos(1/sqrt d) + arccos(1/d): sequential mediation (entangle, then swap).
double smi_bound(int d);

/// |<Psi_AC, 0_B | Psi_AB, 0_C>| on three d-level systems; equals 1/d.
double swap_stage_fidelity(int d);
/// Same overlap after applying `u_b` to subsystem B of both states.
double swap_stage_fidelity(int d, const Matrix& u_b);

struct ReferenceBounds {
  double di = 0;
  double conjecture = 0;
  double smi = 0;
};

struct BoundReport {
  double theta = 0;        // Bures angle between initial and target
  double denominator = 0;  // min{<M>, Delta M}
  double bound = 0;        // theta / denominator
  int d = 2;
  ReferenceBounds reference_bounds;
};

ReferenceBounds reference_bounds(int d);

/// Dimensionless speed limit Theta(s0, target) / min{<M>, Delta M}.
/// Throws StationaryState or LayoutMismatch.
BoundReport unified_bound(const DensityState& s0, const DensityState& target, const Hamiltonian& h, int d);

}  // namespace medqsl
