// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#include "jiou/iou_oracle.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "jiou/errors.hpp"
#include "jiou/random.hpp"

namespace jiou {
namespace {

struct Extent {
  double lo_x, hi_x, lo_y, hi_y;
};

Extent ellipse_extent(const OrientedBoxd& box) {
  const double c = std::cos(box.phi);
  const double s = std::sin(box.phi);
  const double hx = std::sqrt(box.r1 * box.r1 * c * c + box.r2 * box.r2 * s * s);
  const double hy = std::sqrt(box.r1 * box.r1 * s * s + box.r2 * box.r2 * c * c);
  return {box.cx - hx, box.cx + hx, box.cy - hy, box.cy + hy};
}

}  // namespace

MonteCarloEstimate mc_ellipse_iou(const OrientedBoxd& a, const OrientedBoxd& b, long samples,
                                  std::uint64_t seed) {
  if (samples < kMinMonteCarloSamples) {
    throw InsufficientSamplesError("Monte-Carlo IoU needs at least 10^4 samples");
  }
  const Extent ea = ellipse_extent(a);
  const Extent eb = ellipse_extent(b);
  const double lo_x = std::min(ea.lo_x, eb.lo_x);
  const double lo_y = std::min(ea.lo_y, eb.lo_y);
  const double width = std::max(ea.hi_x, eb.hi_x) - lo_x;
  const double height = std::max(ea.hi_y, eb.hi_y) - lo_y;

  std::mt19937_64 gen(seed);
  long inter = 0;
  long uni = 0;
  for (long k = 0; k < samples; ++k) {
    const Point2<double> p(lo_x + width * unit_uniform(gen), lo_y + height * unit_uniform(gen));
    const bool in_a = in_ellipse(a, p);
    const bool in_b = in_ellipse(b, p);
    inter += (in_a && in_b) ? 1 : 0;
    uni += (in_a || in_b) ? 1 : 0;
  }
  if (uni == 0) return {};
  const double p = static_cast<double>(inter) / static_cast<double>(uni);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(uni))};
}

std::vector<Detection> rotated_nms(const std::vector<Detection>& detections,
                                   double iou_threshold) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return detections[i].score > detections[j].score;
  });

  std::vector<Detection> kept;
  for (std::size_t idx : order) {
    const Detection& candidate = detections[idx];
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return k.category == candidate.category &&
             exact_rect_iou(k.box, candidate.box) > iou_threshold;
    });
    if (!suppressed) kept.push_back(candidate);
  }
  return kept;
}

}  // namespace jiou
