// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#include "jiou/target_codec.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "jiou/errors.hpp"

namespace jiou {
namespace {

void check_grid(int classes, long height, long width, long stride) {
  if (classes < 1 || height < 1 || width < 1) throw ShapeError("heatmap grid must be non-empty");
  if (stride < 1) throw ShapeError("stride must be >= 1");
}

CenterOffset locate(const OrientedBoxd& box, long height, long width, long stride) {
  const CenterOffset offset = encode_offset(box.cx, box.cy, stride);
  if (offset.cell_x >= width || offset.cell_y >= height) {
    throw OutOfImageError("object center falls outside the output grid");
  }
  return offset;
}

void check_stack(const PlaneStack& stack, std::size_t channels, long height, long width,
                 const char* what) {
  if (stack.size() != channels) throw ShapeError(std::string(what) + ": wrong channel count");
  for (const Plane& plane : stack) {
    if (plane.rows() != height || plane.cols() != width) {
      throw ShapeError(std::string(what) + ": plane size mismatch");
    }
  }
}

// Larger area wins a shared cell; remaining ties by parameters so the
// outcome never depends on input order.
bool dominates(const OrientedBoxd& a, const OrientedBoxd& b) {
  return std::make_tuple(a.r1 * a.r2, a.r1, a.phi, a.cx, a.cy) >
         std::make_tuple(b.r1 * b.r2, b.r1, b.phi, b.cx, b.cy);
}

}  // namespace

double heatmap_sigma(const OrientedBoxd& box, long stride) {
  const double short_side = std::min(2.0 * box.r1, 2.0 * box.r2);
  return std::max(1.0, short_side / (6.0 * static_cast<double>(stride)));
}

HeatmapTarget render_heatmap(std::span<const LabeledBox> objects, int classes, long height,
                             long width, long stride) {
  check_grid(classes, height, width, stride);
  HeatmapTarget target;
  target.classes = classes;
  target.height = height;
  target.width = width;
  target.values.assign(classes, Plane::Zero(height, width));

  const Eigen::ArrayXd xs = Eigen::ArrayXd::LinSpaced(width, 0.0, static_cast<double>(width - 1));
  const Eigen::ArrayXd ys =
      Eigen::ArrayXd::LinSpaced(height, 0.0, static_cast<double>(height - 1));

  std::map<std::tuple<int, long, long>, bool> seen;
  for (const LabeledBox& object : objects) {
    if (object.category < 0 || object.category >= classes) {
      throw ShapeError("object category outside [0, classes)");
    }
    const CenterOffset cell = locate(object.box, height, width, stride);
    const double sigma = heatmap_sigma(object.box, stride);
    const Eigen::ArrayXd gx = (-(xs - static_cast<double>(cell.cell_x)).square() /
                               (2.0 * sigma * sigma)).exp();
    const Eigen::ArrayXd gy = (-(ys - static_cast<double>(cell.cell_y)).square() /
                               (2.0 * sigma * sigma)).exp();
    Plane kernel = gy.matrix() * gx.matrix().transpose();
    kernel(cell.cell_y, cell.cell_x) = 1.0;

    Plane& plane = target.values[object.category];
    plane = plane.max(kernel);
    if (!seen.emplace(std::make_tuple(object.category, cell.cell_x, cell.cell_y), true).second) {
      continue;
    }
    target.positives.push_back({object.category, cell.cell_x, cell.cell_y});
  }
  return target;
}

EncodedTargets encode_targets(std::span<const LabeledBox> objects, int classes, long height,
                              long width, long stride) {
  EncodedTargets out;
  out.heatmap = render_heatmap(objects, classes, height, width, stride);
  out.offset.assign(2, Plane::Zero(height, width));
  out.params.assign(3, Plane::Zero(height, width));

  // Winner per (category, cell) for the regression tuples, per cell for the
  // class-agnostic maps.
  std::map<std::tuple<int, long, long>, const LabeledBox*> per_positive;
  std::map<std::pair<long, long>, const LabeledBox*> per_cell;
  for (const LabeledBox& object : objects) {
    const CenterOffset cell = encode_offset(object.box.cx, object.box.cy, stride);
    auto update = [&](auto& slot) {
      if (slot == nullptr || dominates(object.box, slot->box)) slot = &object;
    };
    update(per_positive[{object.category, cell.cell_x, cell.cell_y}]);
    update(per_cell[{cell.cell_x, cell.cell_y}]);
  }

  for (const auto& [key, object] : per_cell) {
    const auto [x, y] = key;
    const CenterOffset cell = encode_offset(object->box.cx, object->box.cy, stride);
    out.offset[0](y, x) = cell.dx;
    out.offset[1](y, x) = cell.dy;
    out.params[0](y, x) = object->box.phi;
    out.params[1](y, x) = object->box.r1;
    out.params[2](y, x) = object->box.r2;
  }

  for (const HeatmapPositive& positive : out.heatmap.positives) {
    const LabeledBox* object = per_positive.at({positive.category, positive.cell_x, positive.cell_y});
    const CenterOffset cell = encode_offset(object->box.cx, object->box.cy, stride);
    RegressionTuple tuple;
    tuple << object->box.phi, object->box.r1, object->box.r2, cell.dx, cell.dy;
    out.regression.tuples.push_back(tuple);
  }
  return out;
}

double focal_loss(const PlaneStack& pred, const HeatmapTarget& target, double alpha,
                  double gamma) {
  check_stack(pred, target.values.size(), target.height, target.width, "focal_loss prediction");
  double sum = 0.0;
  long positives = 0;
  for (std::size_t c = 0; c < pred.size(); ++c) {
    const Plane pt = pred[c].max(kProbabilityClamp).min(1.0 - kProbabilityClamp);
    const Plane& y = target.values[c];
    for (Eigen::Index row = 0; row < pt.rows(); ++row) {
      for (Eigen::Index col = 0; col < pt.cols(); ++col) {
        const double p = pt(row, col);
        const double label = y(row, col);
        if (label == 1.0) {
          sum += std::pow(1.0 - p, gamma) * std::log(p);
          ++positives;
        } else {
          sum += std::pow(1.0 - label, alpha) * std::pow(p, gamma) * std::log(1.0 - p);
        }
      }
    }
  }
  return -sum / static_cast<double>(std::max(positives, 1L));
}

double smooth_l1(double diff) {
  const double a = std::abs(diff);
  return a < 1.0 ? 0.5 * a * a : a - 0.5;
}

double smooth_l1(std::span<const RegressionTuple> pred, std::span<const RegressionTuple> target) {
  if (pred.size() != target.size()) throw ShapeError("smooth_l1: tuple counts differ");
  if (pred.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    for (int j = 0; j < 5; ++j) sum += smooth_l1(pred[k][j] - target[k][j]);
  }
  return sum / static_cast<double>(pred.size());
}

LossReport total_loss(double classification, double jiou, double regression, double mu) {
  if (!std::isfinite(classification) || !std::isfinite(jiou) || !std::isfinite(regression) ||
      !std::isfinite(mu)) {
    throw InvalidLossError("loss components must be finite");
  }
  return {classification, jiou, regression, mu, classification + mu * jiou + regression};
}

std::vector<Peak> extract_peaks(const PlaneStack& heatmap, int k, double threshold) {
  std::vector<Peak> peaks;
  for (std::size_t c = 0; c < heatmap.size(); ++c) {
    const Plane& plane = heatmap[c];
    const long rows = plane.rows();
    const long cols = plane.cols();
    for (long y = 0; y < rows; ++y) {
      for (long x = 0; x < cols; ++x) {
        const double v = plane(y, x);
        if (!(v >= threshold)) continue;
        bool is_peak = true;
        for (long dy = -1; dy <= 1 && is_peak; ++dy) {
          for (long dx = -1; dx <= 1; ++dx) {
            const long ny = y + dy;
            const long nx = x + dx;
            if ((dy == 0 && dx == 0) || ny < 0 || nx < 0 || ny >= rows || nx >= cols) continue;
            const double w = plane(ny, nx);
            const bool earlier = ny * cols + nx < y * cols + x;
            if (w > v || (w == v && earlier)) {
              is_peak = false;
              break;
            }
          }
        }
        if (is_peak) peaks.push_back({static_cast<int>(c), x, y, v});
      }
    }
  }
  // Candidates were collected in (class, row-major) order; a stable sort
  // keeps that order among equal scores.
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.score > b.score; });
  if (k >= 0 && peaks.size() > static_cast<std::size_t>(k)) peaks.resize(k);
  return peaks;
}

std::vector<Detection> decode_detections(std::span<const Peak> peaks, const PlaneStack& offset,
                                         const PlaneStack& params, long stride) {
  if (offset.empty() || params.empty()) throw ShapeError("decode: empty maps");
  const long height = offset.front().rows();
  const long width = offset.front().cols();
  check_stack(offset, 2, height, width, "decode offset map");
  check_stack(params, 3, height, width, "decode parameter map");

  std::vector<Detection> detections;
  detections.reserve(peaks.size());
  const double d = static_cast<double>(stride);
  for (const Peak& peak : peaks) {
    if (peak.cell_x < 0 || peak.cell_y < 0 || peak.cell_x >= width || peak.cell_y >= height) {
      throw ShapeError("decode: peak outside the map");
    }
    OrientedBoxd raw;
    raw.cx = (static_cast<double>(peak.cell_x) + offset[0](peak.cell_y, peak.cell_x)) * d;
    raw.cy = (static_cast<double>(peak.cell_y) + offset[1](peak.cell_y, peak.cell_x)) * d;
    raw.phi = params[0](peak.cell_y, peak.cell_x);
    raw.r1 = params[1](peak.cell_y, peak.cell_x);
    raw.r2 = params[2](peak.cell_y, peak.cell_x);
    detections.push_back({canonicalize(raw), peak.score, peak.category});
  }
  return detections;
}

}  // namespace jiou
