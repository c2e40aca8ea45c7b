#pragma once

#include <type_traits>

#include <Eigen/Dense>

namespace epd {

using Index = Eigen::Index;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorRef = Eigen::Ref<const DenseVector<Scalar>>;

/// Read-only vector parameter excluded from template deduction; the scalar is
/// pinned by a neighboring argument, so callers can pass plain vectors, refs,
/// or arbitrary dense expressions without spelling out the scalar type.
template <typename Scalar>
using VectorArg = std::type_identity_t<VectorRef<Scalar>>;

}  // namespace epd
