#include "medqsl/state.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace medqsl {

namespace {

bool valid_label(std::string_view s) {
  if (s.empty() || s.size() > 32) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    std::string part(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    part.erase(std::remove_if(part.begin(), part.end(),
                              [](unsigned char c) { return std::isspace(c); }),
               part.end());
    out.push_back(part);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void require_same_layout(const DensityState& a, const DensityState& b) {
  if (!(a.layout() == b.layout()))
    throw Error(ErrorKind::LayoutMismatch,
                to_string(a.layout()) + " vs " + to_string(b.layout()));
}

void require_covering(const SystemLayout& layout, const Bipartition& p) {
  if (p.side_a.empty() || p.side_b.empty())
    throw Error(ErrorKind::PartitionMismatch, "bipartition side is empty");
  std::set<std::string> seen;
  for (const auto& l : p.labels()) {
    if (!layout.contains(l))
      throw Error(ErrorKind::PartitionMismatch, "label " + l + " not in layout " + to_string(layout));
    if (!seen.insert(l).second)
      throw Error(ErrorKind::PartitionMismatch, "label " + l + " appears twice in " + to_string(p));
  }
  if (seen.size() != layout.size())
    throw Error(ErrorKind::PartitionMismatch,
                to_string(p) + " does not cover layout " + to_string(layout));
}

double entropy_bits(const RealVector& lambda) {
  double s = 0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    if (lambda(k) > 0) s -= lambda(k) * std::log2(lambda(k));
  return std::max(0.0, s);
}

// PSD square root that reuses the pure vector when available.
Matrix sqrt_state(const DensityState& s) {
  if (s.pure_vector()) return s.matrix();
  return sqrtm_psd(s.matrix());
}

}  // namespace

// ---------------------------------------------------------------------------
// SystemLayout

SystemLayout::SystemLayout(std::vector<Subsystem> subsystems) : subsystems_(std::move(subsystems)) {
  if (subsystems_.empty()) throw Error(ErrorKind::InvalidArgument, "layout has no subsystems");
  std::set<std::string> seen;
  for (const auto& s : subsystems_) {
    if (!valid_label(s.label))
      throw Error(ErrorKind::InvalidArgument, "invalid subsystem label '" + s.label + "'");
    if (!seen.insert(s.label).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate subsystem label '" + s.label + "'");
    if (s.dim < 2)
      throw Error(ErrorKind::BadDimension,
                  "subsystem " + s.label + " has dimension " + std::to_string(s.dim));
    dims_.push_back(s.dim);
  }
}

SystemLayout SystemLayout::uniform(const std::vector<std::string>& labels, int dim) {
  std::vector<Subsystem> subs;
  for (const auto& l : labels) subs.push_back({l, dim});
  return SystemLayout(std::move(subs));
}

std::vector<std::string> SystemLayout::labels() const {
  std::vector<std::string> out;
  for (const auto& s : subsystems_) out.push_back(s.label);
  return out;
}

bool SystemLayout::contains(std::string_view label) const {
  return std::any_of(subsystems_.begin(), subsystems_.end(),
                     [&](const Subsystem& s) { return s.label == label; });
}

int SystemLayout::position(std::string_view label) const {
  for (std::size_t k = 0; k < subsystems_.size(); ++k)
    if (subsystems_[k].label == label) return static_cast<int>(k);
  throw Error(ErrorKind::UnknownLabel, "'" + std::string(label) + "' not in layout " + to_string(*this));
}

SubsystemMask SystemLayout::mask(const std::vector<std::string>& labels) const {
  SubsystemMask m(size(), false);
  for (const auto& l : labels) m[position(l)] = true;
  return m;
}

SystemLayout SystemLayout::restricted(const std::vector<std::string>& labels) const {
  const auto m = mask(labels);
  std::vector<Subsystem> subs;
  for (std::size_t k = 0; k < size(); ++k)
    if (m[k]) subs.push_back(subsystems_[k]);
  return SystemLayout(std::move(subs));
}

std::string to_string(const SystemLayout& layout) {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < layout.size(); ++k)
    os << (k ? "," : "") << layout.subsystems()[k].label << ':' << layout.subsystems()[k].dim;
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------
// Bipartition

Bipartition Bipartition::parse(std::string_view text) {
  const auto sides = split(text, ':');
  if (sides.size() != 2)
    throw Error(ErrorKind::InvalidArgument, "bipartition must look like A:B or A,B:C, got '" +
                                                std::string(text) + "'");
  Bipartition p{split(sides[0], ','), split(sides[1], ',')};
  for (const auto& l : p.labels())
    if (!valid_label(l))
      throw Error(ErrorKind::InvalidArgument, "bad label in bipartition '" + std::string(text) + "'");
  auto all = p.labels();
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw Error(ErrorKind::PartitionMismatch, "bipartition sides overlap in '" + std::string(text) + "'");
  return p;
}

std::vector<std::string> Bipartition::labels() const {
  std::vector<std::string> out = side_a;
  out.insert(out.end(), side_b.begin(), side_b.end());
  return out;
}

std::string to_string(const Bipartition& p) {
  std::string out;
  for (std::size_t k = 0; k < p.side_a.size(); ++k) out += (k ? "," : "") + p.side_a[k];
  out += ':';
  for (std::size_t k = 0; k < p.side_b.size(); ++k) out += (k ? "," : "") + p.side_b[k];
  return out;
}

// ---------------------------------------------------------------------------
// DensityState

DensityState DensityState::from_matrix(SystemLayout layout, Matrix rho) {
  if (rho.rows() != layout.total_dim() || rho.cols() != layout.total_dim())
    throw Error(ErrorKind::DimensionMismatch, "density matrix does not match layout " + to_string(layout));
  require_hermitian(rho, "density matrix");
  DensityState s(std::move(layout), hermitian_part(rho), std::nullopt);
  if (!s.matrix().allFinite()) throw Error(ErrorKind::InvalidArgument, "density matrix has non-finite entries");
  if (std::abs(s.matrix().trace() - cplx(1.0)) > 1e-10)
    throw Error(ErrorKind::InvalidArgument, "density matrix trace differs from 1");
  if (auto problem = check_density_invariants(s)) throw Error(ErrorKind::NotPSD, *problem);
  return s;
}

DensityState DensityState::from_pure(SystemLayout layout, Vector psi) {
  if (psi.size() != layout.total_dim())
    throw Error(ErrorKind::DimensionMismatch, "state vector does not match layout " + to_string(layout));
  const double norm = psi.norm();
  if (!(norm > 1e-300) || !psi.allFinite())
    throw Error(ErrorKind::InvalidArgument, "state vector is zero or not finite");
  psi /= norm;
  Matrix rho = psi * psi.adjoint();
  return DensityState(std::move(layout), std::move(rho), std::move(psi));
}

DensityState DensityState::basis(SystemLayout layout, const std::vector<int>& digits) {
  if (digits.size() != layout.size())
    throw Error(ErrorKind::DimensionMismatch, "basis label needs one digit per subsystem");
  Eigen::Index idx = 0;
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (digits[k] < 0 || digits[k] >= layout.dims()[k])
      throw Error(ErrorKind::DimensionMismatch, "basis digit out of range for subsystem " +
                                                    layout.subsystems()[k].label);
    idx = idx * layout.dims()[k] + digits[k];
  }
  Vector psi = Vector::Zero(layout.total_dim());
  psi(idx) = 1;
  return from_pure(std::move(layout), std::move(psi));
}

DensityState DensityState::unchecked(SystemLayout layout, Matrix rho, std::optional<Vector> psi) {
  return DensityState(std::move(layout), std::move(rho), std::move(psi));
}

std::optional<std::string> check_density_invariants(const DensityState& s, double tol) {
  const Matrix& rho = s.matrix();
  if (rho.rows() != s.layout().total_dim()) return "dimension differs from layout";
  if (!rho.allFinite()) return "non-finite entries";
  if ((rho - rho.adjoint()).norm() > tol * std::max(1.0, rho.norm())) return "not Hermitian";
  if (std::abs(rho.trace() - cplx(1.0)) > tol) return "trace differs from 1";
  const RealVector lambda = hermitian_eigenvalues(rho);
  if (lambda.minCoeff() < -tol) return "negative eigenvalue " + std::to_string(lambda.minCoeff());
  if (const auto& psi = s.pure_vector()) {
    if (std::abs(psi->norm() - 1.0) > 1e-12) return "pure vector not normalised";
    if ((rho - *psi * psi->adjoint()).norm() > tol) return "matrix differs from |v><v|";
  }
  return std::nullopt;
}

DensityState tensor_product(const DensityState& a, const DensityState& b) {
  auto subs = a.layout().subsystems();
  subs.insert(subs.end(), b.layout().subsystems().begin(), b.layout().subsystems().end());
  SystemLayout layout(std::move(subs));
  std::optional<Vector> psi;
  if (a.pure_vector() && b.pure_vector()) psi = kron(*a.pure_vector(), *b.pure_vector());
  return DensityState::unchecked(std::move(layout), kron(a.matrix(), b.matrix()), std::move(psi));
}

// ---------------------------------------------------------------------------
// Operations

DensityState maximally_entangled(int d, const SystemLayout& layout) {
  if (layout.size() != 2 || layout.dims()[0] != d || layout.dims()[1] != d)
    throw Error(ErrorKind::DimensionMismatch,
                "maximally entangled state of dimension " + std::to_string(d) +
                    " needs two subsystems of that dimension, got " + to_string(layout));
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int j = 0; j < d; ++j) psi(j * d + j) = 1.0 / std::sqrt(static_cast<double>(d));
  return DensityState::from_pure(layout, std::move(psi));
}

DensityState partial_trace(const DensityState& s, const std::vector<std::string>& keep) {
  if (keep.empty()) throw Error(ErrorKind::InvalidArgument, "partial trace must keep a subsystem");
  SystemLayout reduced = s.layout().restricted(keep);
  if (reduced.size() == s.layout().size()) return s;
  Matrix rho = partial_trace(s.matrix(), s.layout().dims(), s.layout().mask(keep));
  return DensityState::unchecked(std::move(reduced), std::move(rho));
}

Matrix partial_transpose(const DensityState& s, const std::vector<std::string>& transposed) {
  const auto mask = s.layout().mask(transposed);
  const auto count = std::count(mask.begin(), mask.end(), true);
  if (count == 0 || count == static_cast<long>(mask.size()))
    throw Error(ErrorKind::FullOrEmptySet, "partial transpose needs a proper non-empty subset");
  return partial_transpose(s.matrix(), s.layout().dims(), mask);
}

namespace {
double negative_mass(const Matrix& pt) {
  const RealVector lambda = hermitian_eigenvalues(pt);
  double n = 0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    if (lambda(k) <= -kPsdTol) n -= lambda(k);
  return n;
}
}  // namespace

double negativity(const DensityState& s, const Bipartition& p) {
  require_covering(s.layout(), p);
  return negative_mass(partial_transpose(s, p.side_a));
}

double negativity_of_marginal(const DensityState& s, const Bipartition& p) {
  return negativity(partial_trace(s, p.labels()), p);
}

double negativity(const Matrix& rho, int dim_a, int dim_b) {
  return negative_mass(partial_transpose(rho, Dims{dim_a, dim_b}, SubsystemMask{false, true}));
}

double uhlmann_fidelity(const DensityState& rho, const DensityState& sigma) {
  require_same_layout(rho, sigma);
  if (rho.pure_vector() && sigma.pure_vector())
    return std::clamp(std::abs(rho.pure_vector()->dot(*sigma.pure_vector())), 0.0, 1.0);
  // tr sqrt(sqrt(rho) sigma sqrt(rho)) equals the trace norm of sqrt(rho) sqrt(sigma);
  // the singular values avoid square roots of roundoff-level eigenvalues.
  const Matrix product = sqrt_state(rho) * sqrt_state(sigma);
  Eigen::JacobiSVD<Matrix> svd(product);
  return std::clamp(svd.singularValues().sum(), 0.0, 1.0);
}

double bures_angle(const DensityState& rho, const DensityState& sigma) {
  require_same_layout(rho, sigma);
  if (rho.pure_vector() && sigma.pure_vector()) {
    const Vector& u = *rho.pure_vector();
    const Vector& v = *sigma.pure_vector();
    const cplx overlap = u.dot(v);
    const double sine = (v - overlap * u).norm();
    return std::atan2(sine, std::abs(overlap));
  }
  return std::acos(uhlmann_fidelity(rho, sigma));
}

double von_neumann_entropy(const Matrix& rho) { return entropy_bits(hermitian_eigenvalues(rho)); }

double von_neumann_entropy(const DensityState& s) {
  if (s.pure_vector()) return 0.0;
  return von_neumann_entropy(s.matrix());
}

double mutual_information(const DensityState& s, const Bipartition& p) {
  require_covering(s.layout(), p);
  const double sa = von_neumann_entropy(partial_trace(s, p.side_a));
  const double sb = von_neumann_entropy(partial_trace(s, p.side_b));
  return std::max(0.0, sa + sb - von_neumann_entropy(s));
}

double purity(const DensityState& s) { return s.matrix().squaredNorm(); }

std::optional<double> pure_marginal_entanglement(const DensityState& s, const Bipartition& p) {
  const DensityState marginal = partial_trace(s, p.labels());
  if (purity(marginal) < 1 - 1e-10) return std::nullopt;
  return von_neumann_entropy(partial_trace(marginal, p.side_a).matrix());
}

bool is_classically_correlated_on(const DensityState& s, std::string_view mediator) {
  const SystemLayout& layout = s.layout();
  const int pos = layout.position(mediator);
  if (layout.size() == 1) return true;

  // Move the mediator to the least significant position.
  std::vector<int> order;
  for (int k = 0; k < static_cast<int>(layout.size()); ++k)
    if (k != pos) order.push_back(k);
  order.push_back(pos);
  const Matrix rho = permute_subsystems(s.matrix(), layout.dims(), order);
  const Eigen::Index m = layout.dims()[pos];
  const Eigen::Index rest = rho.rows() / m;

  Matrix rho_c = Matrix::Zero(m, m);
  for (Eigen::Index r = 0; r < rest; ++r) rho_c += rho.block(r * m, r * m, m, m);

  // Deterministic generic Hermitian weight on the rest, used to split
  // degenerate eigenspaces of the mediator marginal.
  Matrix w(rest, rest);
  for (Eigen::Index i = 0; i < rest; ++i)
    for (Eigen::Index j = 0; j < rest; ++j)
      w(i, j) = cplx(std::sin(1.0 + 0.7315 * i + 1.3179 * j), std::cos(0.4142 + 1.1731 * i * j + 0.5 * j));
  w = hermitian_part(w);
  Matrix k_c = Matrix::Zero(m, m);
  for (Eigen::Index r = 0; r < rest; ++r)
    for (Eigen::Index q = 0; q < rest; ++q) k_c += w(r, q) * rho.block(q * m, r * m, m, m);
  k_c = hermitian_part(k_c);

  auto eig = hermitian_eig(rho_c);
  Matrix basis = eig.eigenvectors;
  for (Eigen::Index start = 0; start < m;) {
    Eigen::Index stop = start + 1;
    while (stop < m && eig.eigenvalues(stop) - eig.eigenvalues(start) <= 1e-8) ++stop;
    if (stop - start > 1) {
      const Matrix v = basis.middleCols(start, stop - start);
      const Matrix projected = hermitian_part((v.adjoint() * k_c * v).eval());
      const auto inner = hermitian_eig(projected);
      basis.middleCols(start, stop - start) = v * inner.eigenvectors;
    }
    start = stop;
  }

  const Matrix rotated = kron(Matrix::Identity(rest, rest), basis.adjoint()) * rho *
                         kron(Matrix::Identity(rest, rest), basis);
  for (Eigen::Index c = 0; c < m; ++c)
    for (Eigen::Index c2 = 0; c2 < m; ++c2) {
      if (c == c2) continue;
      double block = 0;
      for (Eigen::Index r = 0; r < rest; ++r)
        for (Eigen::Index q = 0; q < rest; ++q) block += std::norm(rotated(r * m + c, q * m + c2));
      if (std::sqrt(block) > 1e-8) return false;
    }
  return true;
}

}  // namespace medqsl
