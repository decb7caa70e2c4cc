#include "medqsl/qsl.hpp"

#include <cmath>

namespace medqsl {

namespace {
void require_dimension(int d) {
  if (d < 2) throw Error(ErrorKind::BadDimension, "d must be at least 2, got " + std::to_string(d));
}

// Computational-basis index of |a, b, c> on three d-level systems.
Eigen::Index triple(int d, int a, int b, int c) {
  return (static_cast<Eigen::Index>(a) * d + b) * d + c;
}
}  // namespace

double di_bound(int d) {
  require_dimension(d);
  return std::acos(1.0 / std::sqrt(static_cast<double>(d)));
}

double conjecture_bound(int d) { return 2.0 * di_bound(d); }

double smi_bound(int d) { return di_bound(d) + std::acos(1.0 / static_cast<double>(d)); }

double swap_stage_fidelity(int d, const Matrix& u_b) {
  require_dimension(d);
  if (u_b.rows() != d || u_b.cols() != d)
    throw Error(ErrorKind::DimensionMismatch, "B-factor unitary must be d x d");
  const auto n = static_cast<Eigen::Index>(d) * d * d;
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  Vector after_first = Vector::Zero(n);   // |Psi_AC>|0_B>
  Vector target = Vector::Zero(n);        // |Psi_AB>|0_C>
  for (int j = 0; j < d; ++j) {
    after_first(triple(d, j, 0, j)) = amp;
    target(triple(d, j, j, 0)) = amp;
  }
  const Matrix local = kron(kron(Matrix::Identity(d, d), u_b), Matrix::Identity(d, d));
  return std::abs((local * after_first).dot(local * target));
}

double swap_stage_fidelity(int d) {
  require_dimension(d);
  return swap_stage_fidelity(d, Matrix::Identity(d, d));
}

ReferenceBounds reference_bounds(int d) { return {di_bound(d), conjecture_bound(d), smi_bound(d)}; }

BoundReport unified_bound(const DensityState& s0, const DensityState& target, const Hamiltonian& h, int d) {
  if (!(s0.layout() == target.layout()))
    throw Error(ErrorKind::LayoutMismatch, "initial and target layouts differ");
  const EnergyMoments moments = energy_moments(h, s0);
  const double denominator = moments.resource();
  if (!(denominator > kStationaryTol))
    throw Error(ErrorKind::StationaryState,
                "min{<M>, dM} = " + std::to_string(denominator) + "; the speed limit is vacuous");
  BoundReport report;
  report.theta = bures_angle(s0, target);
  report.denominator = denominator;
  report.bound = report.theta / denominator;
  report.d = d;
  report.reference_bounds = reference_bounds(d);
  return report;
}

}  // namespace medqsl
