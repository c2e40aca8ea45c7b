#pragma once

#include <cmath>

#include "epd/types.hpp"

namespace epd {

/// Weighted soft threshold, the prox of x -> lambda * <v, |x|> evaluated at z:
///   shrink(z, v, lambda)_i = sign(z_i) * max(|z_i| - lambda * v_i, 0)
/// with sign(0) = 0, so zeros stay exactly zero. v_i = 0 passes the coordinate
/// through unchanged.
template <typename Scalar>
DenseVector<Scalar> shrink(const VectorArg<Scalar>& z, const VectorArg<Scalar>& v,
                           Scalar lambda) {
  return z.array().sign() * (z.array().abs() - lambda * v.array()).max(Scalar(0));
}

template <typename Scalar>
Scalar shrink_scalar(Scalar z, Scalar v, Scalar lambda) {
  const Scalar mag = std::abs(z) - lambda * v;
  if (mag <= Scalar(0)) return Scalar(0);
  return z > Scalar(0) ? mag : -mag;
}

}  // namespace epd
