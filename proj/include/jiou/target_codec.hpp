// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/StdVector>

#include "jiou/iou_oracle.hpp"
#include "jiou/obb.hpp"

namespace jiou {

/// One H x W channel; row index is y, column index is x.
using Plane = Eigen::ArrayXXd;
using PlaneStack = std::vector<Plane>;

inline constexpr long kDefaultStride = 4;
inline constexpr double kDefaultFocalAlpha = 4.0;
inline constexpr double kDefaultFocalGamma = 2.0;
inline constexpr double kDefaultMu = 5.0;
inline constexpr int kDefaultTopK = 100;
inline constexpr double kDefaultPeakThreshold = 0.3;
inline constexpr double kProbabilityClamp = 1e-7;

struct LabeledBox {
  OrientedBoxd box;
  int category = 0;
};

struct HeatmapPositive {
  int category = 0;
  long cell_x = 0;
  long cell_y = 0;
};

struct HeatmapTarget {
  int classes = 0;
  long height = 0;
  long width = 0;
  PlaneStack values;
  std::vector<HeatmapPositive> positives;
};

/// (phi, r1, r2, dx, dy)
using RegressionTuple = Eigen::Matrix<double, 5, 1>;
using RegressionTuples = std::vector<RegressionTuple, Eigen::aligned_allocator<RegressionTuple>>;

/// One tuple per heatmap positive, in the same order.
struct RegressionTarget {
  RegressionTuples tuples;
};

/// Everything a detection head is trained against.
struct EncodedTargets {
  HeatmapTarget heatmap;
  RegressionTarget regression;
  PlaneStack offset;  // dx, dy
  PlaneStack params;  // phi, r1, r2
};

/// Gaussian spread for an object: its short side spans +-3 sigma at output
/// stride, never below one cell.
double heatmap_sigma(const OrientedBoxd& box, long stride);

/// Renders one Gaussian per object at its output-grid cell and combines them
/// by pointwise maximum. Each object's cell holds exactly 1.
HeatmapTarget render_heatmap(std::span<const LabeledBox> objects, int classes, long height,
                             long width, long stride = kDefaultStride);

/// Heatmap plus offset and box-parameter maps. When two objects land on the
/// same cell the maps keep the larger object.
EncodedTargets encode_targets(std::span<const LabeledBox> objects, int classes, long height,
                              long width, long stride = kDefaultStride);

/// Penalty-reduced focal loss over the heatmap, normalized by the number of
/// positive (value 1) cells, floored at one.
double focal_loss(const PlaneStack& pred, const HeatmapTarget& target,
                  double alpha = kDefaultFocalAlpha, double gamma = kDefaultFocalGamma);

double smooth_l1(double diff);

/// Componentwise SmoothL1 summed over the five components, averaged over
/// tuples. Returns 0 for empty input.
double smooth_l1(std::span<const RegressionTuple> pred, std::span<const RegressionTuple> target);

struct LossReport {
  double classification = 0.0;
  double jiou = 0.0;
  double regression = 0.0;
  double mu = kDefaultMu;
  double total = 0.0;
};

LossReport total_loss(double classification, double jiou, double regression,
                      double mu = kDefaultMu);

struct Peak {
  int category = 0;
  long cell_x = 0;
  long cell_y = 0;
  double score = 0.0;
};

/// Cells that dominate their 3x3 neighbourhood with score >= threshold,
/// best `k` first. On a plateau of equal values only the cell that comes
/// first in row-major order is kept.
std::vector<Peak> extract_peaks(const PlaneStack& heatmap, int k = kDefaultTopK,
                                double threshold = kDefaultPeakThreshold);

/// Rebuilds boxes at the peaks: center = (cell + offset) * stride, extents
/// and angle read from the parameter maps.
std::vector<Detection> decode_detections(std::span<const Peak> peaks, const PlaneStack& offset,
                                         const PlaneStack& params, long stride = kDefaultStride);

}  // namespace jiou
