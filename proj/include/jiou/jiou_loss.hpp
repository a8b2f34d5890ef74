// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "jiou/errors.hpp"
#include "jiou/obb.hpp"
#include "jiou/polar_ellipse.hpp"

namespace jiou {

inline constexpr Eigen::Index kDefaultDiscretization = 720;

/// Ratios below this are clamped before taking the logarithm.
inline constexpr double kRatioFloor = 1e-12;

template <typename Scalar>
struct JiouValue {
  Scalar ratio{1};
  Scalar loss{0};
  Eigen::Index n{kDefaultDiscretization};
};

/// Gradient of the loss with respect to the predicted (phi, r1, r2).
template <typename Scalar>
struct JiouGradient {
  Scalar d_phi{0};
  Scalar d_r1{0};
  Scalar d_r2{0};

  Eigen::Matrix<Scalar, 3, 1> vector() const { return {d_phi, d_r1, d_r2}; }
};

namespace detail {

template <typename Scalar>
struct ProfileSums {
  Scalar min_sq{0};
  Scalar max_sq{0};
};

template <typename Scalar>
ProfileSums<Scalar> profile_sums(const RadialProfile<Scalar>& a, const RadialProfile<Scalar>& b) {
  ProfileSums<Scalar> sums;
  for (Eigen::Index i = 0; i < a.n(); ++i) {
    const Scalar lo = std::min(a.rho[i], b.rho[i]);
    const Scalar hi = std::max(a.rho[i], b.rho[i]);
    sums.min_sq += lo * lo;
    sums.max_sq += hi * hi;
  }
  return sums;
}

template <typename Scalar>
JiouValue<Scalar> value_from_sums(const ProfileSums<Scalar>& sums, Eigen::Index n) {
  using std::log;
  JiouValue<Scalar> value;
  value.ratio = std::max(sums.min_sq / sums.max_sq, Scalar(kRatioFloor));
  value.loss = Scalar(0) - log(value.ratio);  // +0 rather than -0 for a perfect match
  value.n = n;
  return value;
}

}  // namespace detail

/// Discrete polar overlap ratio sum(min(rho_p, rho_t)^2) / sum(max(rho_p, rho_t)^2)
/// of the two inscribed ellipses placed on a common pole. Centers are ignored.
template <typename Scalar>
JiouValue<Scalar> jiou_bar(const OrientedBox<Scalar>& pred, const OrientedBox<Scalar>& target,
                           Eigen::Index n = kDefaultDiscretization) {
  check_discretization(n);
  return detail::value_from_sums(detail::profile_sums(discretize(pred, n), discretize(target, n)),
                                 n);
}

/// -log of jiou_bar.
template <typename Scalar>
JiouValue<Scalar> jiou_loss(const OrientedBox<Scalar>& pred, const OrientedBox<Scalar>& target,
                            Eigen::Index n = kDefaultDiscretization) {
  return jiou_bar(pred, target, n);
}

/// Analytic gradient of jiou_loss with respect to the prediction.
///
/// A grid angle where both radii are equal counts towards the min branch.
/// When every angle ties (identical profiles) the loss sits at its global
/// minimum and the zero subgradient is returned.
template <typename Scalar>
JiouGradient<Scalar> jiou_gradient(const OrientedBox<Scalar>& pred,
                                   const OrientedBox<Scalar>& target,
                                   Eigen::Index n = kDefaultDiscretization) {
  check_discretization(n);
  const auto pred_profile = discretize(pred, n);
  const auto target_profile = discretize(target, n);
  const auto sums = detail::profile_sums(pred_profile, target_profile);
  if (pred_profile.rho == target_profile.rho) return {};
  if (sums.min_sq / sums.max_sq < Scalar(kRatioFloor)) return {};

  // loss = -log(min_sq) + log(max_sq)
  Eigen::Matrix<Scalar, 3, 1> grad = Eigen::Matrix<Scalar, 3, 1>::Zero();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar rho = pred_profile.rho[i];
    const Scalar weight = rho <= target_profile.rho[i] ? -Scalar(2) * rho / sums.min_sq
                                                       : Scalar(2) * rho / sums.max_sq;
    grad += weight * radius_gradient(pred, pred_profile.theta(i));
  }
  return {grad[0], grad[1], grad[2]};
}

template <typename Scalar>
struct BatchJiou {
  Scalar mean_loss{0};
  std::vector<JiouValue<Scalar>> values;
  std::vector<JiouGradient<Scalar>> gradients;
};

/// Elementwise loss and gradient over paired boxes; the batch loss is the
/// arithmetic mean, reduced in input order.
template <typename Scalar>
BatchJiou<Scalar> batch_jiou(std::span<const OrientedBox<Scalar>> preds,
                             std::span<const OrientedBox<Scalar>> targets,
                             Eigen::Index n = kDefaultDiscretization) {
  if (preds.size() != targets.size()) {
    throw BatchShapeError("prediction and target batches differ in length");
  }
  if (preds.empty()) throw EmptyBatchError("batch is empty");
  check_discretization(n);
  BatchJiou<Scalar> batch;
  batch.values.reserve(preds.size());
  batch.gradients.reserve(preds.size());
  Scalar total = 0;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    batch.values.push_back(jiou_loss(preds[k], targets[k], n));
    batch.gradients.push_back(jiou_gradient(preds[k], targets[k], n));
    total += batch.values.back().loss;
  }
  batch.mean_loss = total / static_cast<Scalar>(preds.size());
  return batch;
}

}  // namespace jiou
