#pragma once

// Index bookkeeping for tensor-product spaces. A basis index is
// i = sum_k i_k * prod_{l>k} d_l, i.e. the first subsystem is most significant.

#include <vector>

#include "medqsl/tensor.hpp"

namespace medqsl {

using Dims = std::vector<int>;
/// One flag per subsystem position.
using SubsystemMask = std::vector<bool>;

Eigen::Index total_dim(const Dims& dims);

/// Full-space offsets of every multi-index over `positions`, enumerated with
/// positions.front() most significant.
std::vector<Eigen::Index> subsystem_offsets(const Dims& dims, const std::vector<int>& positions);

Matrix partial_trace(const Matrix& m, const Dims& dims, const SubsystemMask& keep);
Matrix partial_transpose(const Matrix& m, const Dims& dims, const SubsystemMask& transposed);

/// Embeds `op`, whose tensor factors act on `positions` (in that order), into
/// the full space with identities elsewhere.
Matrix embed_operator(const Matrix& op, const Dims& dims, const std::vector<int>& positions);

/// Output subsystem k is input subsystem order[k].
Matrix permute_subsystems(const Matrix& m, const Dims& dims, const std::vector<int>& order);
Vector permute_subsystems(const Vector& v, const Dims& dims, const std::vector<int>& order);

/// tr_{not keep}(X X^dagger) without forming X X^dagger.
Matrix reduced_from_factor(const Matrix& x, const Dims& dims, const SubsystemMask& keep);

}  // namespace medqsl
