#include "medqsl/subsystems.hpp"

#include <numeric>
#include <string>

namespace medqsl {

namespace {

std::vector<int> positions_where(const SubsystemMask& mask, bool value) {
  std::vector<int> out;
  for (std::size_t k = 0; k < mask.size(); ++k)
    if (mask[k] == value) out.push_back(static_cast<int>(k));
  return out;
}

void check_square(const Matrix& m, const Dims& dims) {
  const Eigen::Index n = total_dim(dims);
  if (m.rows() != n || m.cols() != n)
    throw Error(ErrorKind::DimensionMismatch,
                "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    ", layout dimension " + std::to_string(n));
}

void check_mask(const SubsystemMask& mask, const Dims& dims) {
  if (mask.size() != dims.size())
    throw Error(ErrorKind::DimensionMismatch, "subsystem mask size differs from layout");
}

}  // namespace

Eigen::Index total_dim(const Dims& dims) {
  Eigen::Index n = 1;
  for (int d : dims) n *= d;
  return n;
}

std::vector<Eigen::Index> subsystem_offsets(const Dims& dims, const std::vector<int>& positions) {
  std::vector<Eigen::Index> stride(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];

  Eigen::Index count = 1;
  for (int p : positions) count *= dims[p];
  std::vector<Eigen::Index> out(static_cast<std::size_t>(count));
  for (Eigen::Index idx = 0; idx < count; ++idx) {
    Eigen::Index rem = idx, off = 0;
    for (auto it = positions.rbegin(); it != positions.rend(); ++it) {
      off += (rem % dims[*it]) * stride[*it];
      rem /= dims[*it];
    }
    out[static_cast<std::size_t>(idx)] = off;
  }
  return out;
}

Matrix partial_trace(const Matrix& m, const Dims& dims, const SubsystemMask& keep) {
  check_square(m, dims);
  check_mask(keep, dims);
  const auto kept = subsystem_offsets(dims, positions_where(keep, true));
  const auto traced = subsystem_offsets(dims, positions_where(keep, false));
  const auto nk = static_cast<Eigen::Index>(kept.size());
  Matrix out = Matrix::Zero(nk, nk);
  for (Eigen::Index a = 0; a < nk; ++a)
    for (Eigen::Index b = 0; b < nk; ++b) {
      cplx acc = 0;
      for (Eigen::Index r : traced) acc += m(kept[a] + r, kept[b] + r);
      out(a, b) = acc;
    }
  return out;
}

Matrix partial_transpose(const Matrix& m, const Dims& dims, const SubsystemMask& transposed) {
  check_square(m, dims);
  check_mask(transposed, dims);
  const auto fixed = subsystem_offsets(dims, positions_where(transposed, false));
  const auto flipped = subsystem_offsets(dims, positions_where(transposed, true));
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index a : fixed)
    for (Eigen::Index b : fixed)
      for (Eigen::Index x : flipped)
        for (Eigen::Index y : flipped) out(a + x, b + y) = m(a + y, b + x);
  return out;
}

Matrix embed_operator(const Matrix& op, const Dims& dims, const std::vector<int>& positions) {
  const auto inner = subsystem_offsets(dims, positions);
  if (op.rows() != static_cast<Eigen::Index>(inner.size()) || op.cols() != op.rows())
    throw Error(ErrorKind::DimensionMismatch, "operator does not match its subsystems");
  SubsystemMask used(dims.size(), false);
  for (int p : positions) {
    if (p < 0 || p >= static_cast<int>(dims.size()) || used[p])
      throw Error(ErrorKind::InvalidArgument, "bad subsystem position list");
    used[p] = true;
  }
  const auto rest = subsystem_offsets(dims, positions_where(used, false));
  const Eigen::Index n = total_dim(dims);
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index r : rest)
    for (Eigen::Index a = 0; a < op.rows(); ++a)
      for (Eigen::Index b = 0; b < op.cols(); ++b) out(inner[a] + r, inner[b] + r) = op(a, b);
  return out;
}

Matrix permute_subsystems(const Matrix& m, const Dims& dims, const std::vector<int>& order) {
  check_square(m, dims);
  const auto src = subsystem_offsets(dims, order);
  const auto n = static_cast<Eigen::Index>(src.size());
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m(src[i], src[j]);
  return out;
}

Vector permute_subsystems(const Vector& v, const Dims& dims, const std::vector<int>& order) {
  const auto src = subsystem_offsets(dims, order);
  Vector out(static_cast<Eigen::Index>(src.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = v(src[i]);
  return out;
}

Matrix reduced_from_factor(const Matrix& x, const Dims& dims, const SubsystemMask& keep) {
  check_mask(keep, dims);
  if (x.rows() != total_dim(dims))
    throw Error(ErrorKind::DimensionMismatch, "factor rows differ from layout dimension");
  const auto kept = subsystem_offsets(dims, positions_where(keep, true));
  const auto traced = subsystem_offsets(dims, positions_where(keep, false));
  const auto nk = static_cast<Eigen::Index>(kept.size());
  const auto nt = static_cast<Eigen::Index>(traced.size());
  Matrix y(nk, nt * x.cols());
  for (Eigen::Index a = 0; a < nk; ++a)
    for (Eigen::Index t = 0; t < nt; ++t)
      y.row(a).segment(t * x.cols(), x.cols()) = x.row(kept[a] + traced[t]);
  return y * y.adjoint();
}

}  // namespace medqsl
