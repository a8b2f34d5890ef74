// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "jiou/target_codec.hpp"

namespace jiou {

inline constexpr int kDefaultScales = 4;

/// Outputs of the m multi-scale branches, each with c/m channels of the
/// same spatial size.
struct FeatureStack {
  std::vector<PlaneStack> groups;

  int scales() const { return static_cast<int>(groups.size()); }
  long group_channels() const;
  long channels() const { return scales() * group_channels(); }
  long height() const;
  long width() const;

  /// Throws ShapeError unless every group has the same channel count and
  /// every plane the same size.
  void validate() const;
};

/// Per-scale channel weights; each group is a probability vector.
struct GroupWeights {
  std::vector<Eigen::VectorXd> groups;
};

enum class Activation { kRectifier, kIdentity };

/// Spatial mean of every channel of the concatenated stack, passed through
/// the affine map `embed * x + bias` and the activation.
Eigen::VectorXd global_pool_embed(const FeatureStack& stack, const Eigen::MatrixXd& embed,
                                  const Eigen::VectorXd& bias = Eigen::VectorXd(),
                                  Activation activation = Activation::kRectifier);

/// Softmax of each group of a length-c logit vector split into m groups.
GroupWeights softmax_groups(const Eigen::VectorXd& logits, int scales);

/// Maps `w` through one (c/m x c) matrix per scale and normalizes each
/// result with a softmax.
GroupWeights group_softmax(const Eigen::VectorXd& w, std::span<const Eigen::MatrixXd> per_group_maps);

/// Scales channel j of group i by weights[i][j] and returns the
/// concatenated c-channel feature.
PlaneStack apply_weights(const FeatureStack& stack, const GroupWeights& weights);

}  // namespace jiou
