// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#include "jiou/wm_attention.hpp"

#include "jiou/errors.hpp"

namespace jiou {
namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const Eigen::ArrayXd e = (logits.array() - logits.maxCoeff()).exp();
  return (e / e.sum()).matrix();
}

}  // namespace

long FeatureStack::group_channels() const {
  return groups.empty() ? 0 : static_cast<long>(groups.front().size());
}

long FeatureStack::height() const {
  return groups.empty() || groups.front().empty() ? 0 : groups.front().front().rows();
}

long FeatureStack::width() const {
  return groups.empty() || groups.front().empty() ? 0 : groups.front().front().cols();
}

void FeatureStack::validate() const {
  if (groups.empty() || group_channels() == 0) throw ShapeError("feature stack is empty");
  for (const PlaneStack& group : groups) {
    if (static_cast<long>(group.size()) != group_channels()) {
      throw ShapeError("feature groups differ in channel count");
    }
    for (const Plane& plane : group) {
      if (plane.rows() != height() || plane.cols() != width()) {
        throw ShapeError("feature planes differ in spatial size");
      }
    }
  }
}

Eigen::VectorXd global_pool_embed(const FeatureStack& stack, const Eigen::MatrixXd& embed,
                                  const Eigen::VectorXd& bias, Activation activation) {
  stack.validate();
  const long c = stack.channels();
  if (embed.rows() != c || embed.cols() != c) throw ShapeError("embedding must be c x c");
  if (bias.size() != 0 && bias.size() != c) throw ShapeError("bias must have length c");

  Eigen::VectorXd pooled(c);
  long j = 0;
  for (const PlaneStack& group : stack.groups) {
    for (const Plane& plane : group) pooled[j++] = plane.mean();
  }
  Eigen::VectorXd out = embed * pooled;
  if (bias.size() != 0) out += bias;
  if (activation == Activation::kRectifier) out = out.cwiseMax(0.0);
  return out;
}

GroupWeights softmax_groups(const Eigen::VectorXd& logits, int scales) {
  if (scales < 1 || logits.size() == 0 || logits.size() % scales != 0) {
    throw GroupingError("scale count must divide the channel count");
  }
  const long per_group = logits.size() / scales;
  GroupWeights weights;
  for (int i = 0; i < scales; ++i) {
    weights.groups.push_back(softmax(logits.segment(i * per_group, per_group)));
  }
  return weights;
}

GroupWeights group_softmax(const Eigen::VectorXd& w,
                           std::span<const Eigen::MatrixXd> per_group_maps) {
  const long c = w.size();
  const long scales = static_cast<long>(per_group_maps.size());
  if (scales < 1 || c == 0 || c % scales != 0) {
    throw GroupingError("scale count must divide the channel count");
  }
  const long per_group = c / scales;
  GroupWeights weights;
  for (const Eigen::MatrixXd& map : per_group_maps) {
    if (map.rows() != per_group || map.cols() != c) {
      throw ShapeError("per-group map must be (c/m) x c");
    }
    weights.groups.push_back(softmax(map * w));
  }
  return weights;
}

PlaneStack apply_weights(const FeatureStack& stack, const GroupWeights& weights) {
  stack.validate();
  if (weights.groups.size() != stack.groups.size()) throw ShapeError("weight group count mismatch");
  PlaneStack out;
  out.reserve(static_cast<std::size_t>(stack.channels()));
  for (std::size_t i = 0; i < stack.groups.size(); ++i) {
    const Eigen::VectorXd& w = weights.groups[i];
    if (w.size() != stack.group_channels()) throw ShapeError("weight group length mismatch");
    for (long j = 0; j < w.size(); ++j) out.push_back(stack.groups[i][j] * w[j]);
  }
  return out;
}

}  // namespace jiou
