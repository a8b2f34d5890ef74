// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "jiou/errors.hpp"
#include "jiou/obb.hpp"

namespace jiou {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Polar radius, about the box center, of the ellipse inscribed in `box`:
///
///   rho(theta) = r1 r2 / sqrt(r2^2 cos^2(theta - phi) + r1^2 sin^2(theta - phi))
template <typename Scalar>
Scalar radius_at(const OrientedBox<Scalar>& box, Scalar theta) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Scalar c = cos(theta - box.phi);
  const Scalar s = sin(theta - box.phi);
  return box.r1 * box.r2 / sqrt(box.r2 * box.r2 * c * c + box.r1 * box.r1 * s * s);
}

/// Angle of grid slot `i` out of `n`: 2 pi i / n.
template <typename Scalar>
Scalar grid_angle(Eigen::Index i, Eigen::Index n) {
  return Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(i) / Scalar(n);
}

inline void check_discretization(Eigen::Index n) {
  if (n < 4) throw InvalidDiscretizationError("discretization count must be >= 4");
}

/// Radii of the inscribed ellipse sampled on the uniform angle grid.
template <typename Scalar>
struct RadialProfile {
  Vector<Scalar> rho;

  Eigen::Index n() const { return rho.size(); }
  Scalar theta(Eigen::Index i) const { return grid_angle<Scalar>(i, n()); }
};

template <typename Scalar>
RadialProfile<Scalar> discretize(const OrientedBox<Scalar>& box, Eigen::Index n) {
  check_discretization(n);
  RadialProfile<Scalar> profile;
  profile.rho.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) profile.rho[i] = radius_at(box, grid_angle<Scalar>(i, n));
  return profile;
}

/// Partial derivatives of rho(theta) with respect to (phi, r1, r2).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> radius_gradient(const OrientedBox<Scalar>& box, Scalar theta) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Scalar c = cos(theta - box.phi);
  const Scalar s = sin(theta - box.phi);
  const Scalar r1 = box.r1;
  const Scalar r2 = box.r2;
  const Scalar denom = r2 * r2 * c * c + r1 * r1 * s * s;
  const Scalar denom32 = denom * sqrt(denom);
  Eigen::Matrix<Scalar, 3, 1> grad;
  grad << r1 * r2 * c * s * (r1 * r1 - r2 * r2) / denom32,  //
      r2 * r2 * r2 * c * c / denom32,                        //
      r1 * r1 * r1 * s * s / denom32;
  return grad;
}

}  // namespace jiou
