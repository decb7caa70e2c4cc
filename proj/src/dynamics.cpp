#include "medqsl/dynamics.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace medqsl {

// ---------------------------------------------------------------------------
// TimeGrid

TimeGrid TimeGrid::make(double start, double stop, double step) {
  if (!(start >= 0) || !(stop > start) || !(step > 0) || !std::isfinite(stop))
    throw Error(ErrorKind::InvalidArgument, "time grid needs 0 <= start < stop and step > 0");
  if ((stop - start) / step > 1e7)
    throw Error(ErrorKind::InvalidArgument, "time grid exceeds 1e7 intervals");
  return {start, stop, step};
}

TimeGrid TimeGrid::uniform(double start, double stop, std::size_t intervals) {
  if (intervals == 0) throw Error(ErrorKind::InvalidArgument, "time grid needs at least one interval");
  return make(start, stop, (stop - start) / static_cast<double>(intervals));
}

std::size_t TimeGrid::size() const {
  return static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
}

double TimeGrid::at(std::size_t k) const {
  const double t = start + static_cast<double>(k) * step;
  if (std::abs(t - stop) <= 1e-9 * step) return stop;
  return t;
}

std::vector<double> TimeGrid::points() const {
  std::vector<double> out(size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = at(k);
  return out;
}

// ---------------------------------------------------------------------------
// UnitaryPropagator

UnitaryPropagator::UnitaryPropagator(const Hamiltonian& h, const DensityState& s0)
    : s0_(s0), spectrum_(hermitian_eig(h.matrix())) {
  if (!(h.layout() == s0.layout()))
    throw Error(ErrorKind::LayoutMismatch,
                "Hamiltonian on " + to_string(h.layout()) + ", state on " + to_string(s0.layout()));
  Matrix factor;
  if (const auto& psi = s0.pure_vector()) {
    factor = *psi;
  } else {
    auto eig = hermitian_eig(s0.matrix());
    clamp_psd_spectrum(eig.eigenvalues);
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k)
      if (eig.eigenvalues(k) > 0) ++rank;
    factor.resize(s0.dim(), rank);
    Eigen::Index col = 0;
    for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k)
      if (eig.eigenvalues(k) > 0) factor.col(col++) = eig.eigenvectors.col(k) * std::sqrt(eig.eigenvalues(k));
  }
  eigen_factor_ = spectrum_.eigenvectors.adjoint() * factor;
}

Matrix UnitaryPropagator::factor_at(double t) const {
  const Eigen::Index n = spectrum_.eigenvalues.size();
  Matrix phased = eigen_factor_;
  for (Eigen::Index k = 0; k < n; ++k) phased.row(k) *= std::polar(1.0, -t * spectrum_.eigenvalues(k));
  return spectrum_.eigenvectors * phased;
}

DensityState UnitaryPropagator::state_at(double t) const {
  if (t == 0) return s0_;
  const Matrix x = factor_at(t);
  if (s0_.pure_vector()) {
    Vector psi = x.col(0);
    Matrix rho = psi * psi.adjoint();
    return DensityState::unchecked(s0_.layout(), std::move(rho), std::move(psi));
  }
  return DensityState::unchecked(s0_.layout(), hermitian_part((x * x.adjoint()).eval()));
}

Matrix UnitaryPropagator::marginal_at(double t, const SubsystemMask& keep) const {
  return reduced_from_factor(factor_at(t), s0_.layout().dims(), keep);
}

// ---------------------------------------------------------------------------
// Jump operators and Lindblad propagation

bool JumpOperatorSet::empty() const {
  for (const auto& [label, list] : operators)
    if (!list.empty()) return false;
  return true;
}

void JumpOperatorSet::add(const std::string& label, Matrix op) { operators[label].push_back(std::move(op)); }

JumpOperatorSet JumpOperatorSet::local_dephasing(const SystemLayout& layout,
                                                 const std::vector<std::string>& labels, double gamma) {
  JumpOperatorSet out;
  for (const auto& l : labels) {
    const int d = layout.dim(l);
    Matrix z = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) z(j, j) = 1.0 - 2.0 * j / (d - 1);
    out.add(l, std::sqrt(gamma) * z);
  }
  return out;
}

JumpOperatorSet JumpOperatorSet::local_damping(const SystemLayout& layout,
                                               const std::vector<std::string>& labels, double gamma) {
  JumpOperatorSet out;
  for (const auto& l : labels) {
    const int d = layout.dim(l);
    Matrix lower = Matrix::Zero(d, d);
    for (int j = 1; j < d; ++j) lower(j - 1, j) = 1.0;
    out.add(l, std::sqrt(gamma) * lower);
  }
  return out;
}

LindbladPropagator::LindbladPropagator(const Hamiltonian& h, const JumpOperatorSet& jumps,
                                       LindbladOptions options)
    : effective_(h.matrix()), options_(options) {
  if (!(options_.max_step > 0)) throw Error(ErrorKind::InvalidArgument, "Lindblad max_step must be positive");
  const SystemLayout& layout = h.layout();
  for (const auto& [label, list] : jumps.operators) {
    const int pos = layout.position(label);
    for (const Matrix& q : list) {
      if (q.rows() != layout.dims()[pos] || q.cols() != q.rows())
        throw Error(ErrorKind::DimensionMismatch, "jump operator on " + label + " has wrong dimension");
      Matrix full = embed_operator(q, layout.dims(), {pos});
      effective_ -= cplx(0, 0.5) * (full.adjoint() * full);
      jumps_.push_back(std::move(full));
    }
  }
}

Matrix LindbladPropagator::derivative(const Matrix& rho) const {
  const Matrix a = effective_ * rho;
  Matrix out = cplx(0, -1) * (a - a.adjoint());
  for (const Matrix& q : jumps_) out.noalias() += q * rho * q.adjoint();
  return out;
}

Matrix LindbladPropagator::advance(const Matrix& rho0, double t0, double t1) const {
  if (t1 <= t0) return rho0;
  const auto steps = static_cast<long>(std::ceil((t1 - t0) / options_.max_step - 1e-9));
  const double dt = (t1 - t0) / static_cast<double>(std::max(1L, steps));
  Matrix rho = rho0;
  for (long s = 0; s < std::max(1L, steps); ++s) {
    const Matrix k1 = derivative(rho);
    const Matrix k2 = derivative(rho + 0.5 * dt * k1);
    const Matrix k3 = derivative(rho + 0.5 * dt * k2);
    const Matrix k4 = derivative(rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = hermitian_part(rho);
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Observables and evolution

Observables observe(const DensityState& s, const DensityState& s0, const Matrix& h,
                    double ground_energy, const ObserveConfig& config) {
  Observables o;
  const DensityState ab = partial_trace(s, config.bipartition.labels());
  o.negativity = negativity(ab, config.bipartition);
  o.mutual_information = mutual_information(ab, config.bipartition);
  o.fidelity_to_target = config.target ? uhlmann_fidelity(s, *config.target)
                                       : std::numeric_limits<double>::quiet_NaN();
  o.bures_angle_from_initial = bures_angle(s0, s);
  o.purity_marginal = purity(config.marginal ? partial_trace(s, *config.marginal) : ab);
  const EnergyMoments e = energy_moments(h, ground_energy, s);
  o.mean_energy = e.mean_above_ground;
  o.energy_std = e.std_dev;
  return o;
}

namespace {

void check_observe_config(const SystemLayout& layout, const ObserveConfig& config) {
  for (const auto& l : config.bipartition.labels()) (void)layout.position(l);
  if (config.target && !(config.target->layout() == layout))
    throw Error(ErrorKind::LayoutMismatch, "target state layout differs from the evolved state");
}

}  // namespace

Trajectory evolve_unitary(const Hamiltonian& h, const DensityState& s0, const TimeGrid& grid,
                          const ObserveConfig& config) {
  check_observe_config(s0.layout(), config);
  const UnitaryPropagator propagator(h, s0);
  Trajectory out{grid, grid.points(), {}, {}};
  out.observables.reserve(out.times.size());
  for (double t : out.times) {
    DensityState s = propagator.state_at(t);
    out.observables.push_back(observe(s, s0, h.matrix(), propagator.ground_energy(), config));
    if (config.keep_states) out.states.push_back(std::move(s));
  }
  return out;
}

Trajectory evolve_lindblad(const Hamiltonian& h, const JumpOperatorSet& jumps, const DensityState& s0,
                           const TimeGrid& grid, const ObserveConfig& config, LindbladOptions options) {
  if (!(h.layout() == s0.layout()))
    throw Error(ErrorKind::LayoutMismatch,
                "Hamiltonian on " + to_string(h.layout()) + ", state on " + to_string(s0.layout()));
  check_observe_config(s0.layout(), config);
  const LindbladPropagator propagator(h, jumps, options);
  const double ground = hermitian_eigenvalues(h.matrix())(0);
  Trajectory out{grid, grid.points(), {}, {}};
  Matrix rho = s0.matrix();
  double t_prev = 0;
  for (double t : out.times) {
    rho = propagator.advance(rho, t_prev, t);
    t_prev = t;
    const double lowest = hermitian_eigenvalues(rho)(0);
    if (lowest < -options.positivity_tol)
      throw Error(ErrorKind::PositivityLost,
                  "eigenvalue " + std::to_string(lowest) + " at T=" + std::to_string(t) +
                      "; reduce the integration step");
    DensityState s = t == 0 ? s0 : DensityState::unchecked(s0.layout(), rho);
    out.observables.push_back(observe(s, s0, h.matrix(), ground, config));
    if (config.keep_states) out.states.push_back(std::move(s));
  }
  return out;
}

double entanglement_change_at_zero(const Hamiltonian& h, const JumpOperatorSet& jumps,
                                   const DensityState& s0, const Bipartition& p, double delta) {
  if (!(delta >= 1e-6 && delta <= 1e-3))
    throw Error(ErrorKind::InvalidArgument, "delta must lie in [1e-6, 1e-3]");
  const double before = negativity_of_marginal(s0, p);
  if (jumps.empty()) {
    const UnitaryPropagator propagator(h, s0);
    return negativity_of_marginal(propagator.state_at(delta), p) - before;
  }
  if (!(h.layout() == s0.layout()))
    throw Error(ErrorKind::LayoutMismatch, "Hamiltonian and state layouts differ");
  const LindbladPropagator propagator(h, jumps);
  const Matrix rho = propagator.advance(s0.matrix(), 0.0, delta);
  return negativity_of_marginal(DensityState::unchecked(s0.layout(), rho), p) - before;
}

namespace {

struct Peak {
  double time;
  double value;
};

Peak golden_section_max(const std::function<double(double)>& f, double a, double b, double tol) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  const double t = 0.5 * (a + b);
  return {t, f(t)};
}

}  // namespace

std::optional<double> first_max_entanglement_time(const UnitaryPropagator& propagator,
                                                  const Bipartition& p, int d, double horizon) {
  if (!(horizon > 0 && horizon <= 50))
    throw Error(ErrorKind::InvalidArgument, "horizon must lie in (0, 50]");
  if (d < 2) throw Error(ErrorKind::BadDimension, "d must be at least 2");
  const SystemLayout& layout = propagator.initial().layout();
  const SubsystemMask keep = layout.mask(p.labels());
  const SystemLayout reduced = layout.restricted(p.labels());
  const auto n_at = [&](double t) {
    return negativity(DensityState::unchecked(reduced, propagator.marginal_at(t, keep)), p);
  };

  constexpr double kScanStep = 1e-3;
  constexpr double kRefineTol = 1e-9;
  // Peaks are refined when the scan gets this close; the grid can straddle a
  // narrow maximum by up to half a step.
  constexpr double kCandidateMargin = 1e-3;
  const double target = 0.5 * (d - 1);
  const double threshold = target - 1e-7;

  const auto steps = static_cast<long>(std::floor(horizon / kScanStep + 1e-9));
  double prev = n_at(0.0);
  double curr = steps >= 1 ? n_at(kScanStep) : prev;
  if (prev >= threshold && curr <= prev) {
    const Peak peak = golden_section_max(n_at, 0.0, std::min(kScanStep, horizon), kRefineTol);
    return peak.value > prev ? peak.time : 0.0;
  }
  for (long k = 1; k <= steps; ++k) {
    const double next = k < steps ? n_at((k + 1) * kScanStep) : -1.0;
    const bool is_peak = curr >= prev && curr >= next;
    if (is_peak && curr >= target - kCandidateMargin) {
      const double lo = (k - 1) * kScanStep;
      const double hi = std::min((k + 1) * kScanStep, horizon);
      const Peak peak = golden_section_max(n_at, lo, hi, kRefineTol);
      if (std::max(peak.value, curr) >= threshold) return peak.value >= curr ? peak.time : k * kScanStep;
    }
    prev = curr;
    curr = next;
  }
  return std::nullopt;
}

std::optional<double> first_max_entanglement_time(const Hamiltonian& h, const DensityState& s0,
                                                  const Bipartition& p, int d, double horizon) {
  return first_max_entanglement_time(UnitaryPropagator(h, s0), p, d, horizon);
}

}  // namespace medqsl
