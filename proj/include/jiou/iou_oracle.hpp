// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/StdVector>

#include "jiou/obb.hpp"

namespace jiou {

template <typename Scalar>
using Polygon = std::vector<Point2<Scalar>, Eigen::aligned_allocator<Point2<Scalar>>>;

/// Standard (y-up) shoelace area; positive for counter-clockwise vertices.
template <typename Scalar>
Scalar signed_area(const Polygon<Scalar>& poly) {
  Scalar twice = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return twice / 2;
}

namespace detail {

template <typename Scalar>
Scalar cross(const Point2<Scalar>& a, const Point2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Keeps the part of `subject` on the `side` (+1 left, -1 right) of a->b.
template <typename Scalar>
Polygon<Scalar> clip_half_plane(const Polygon<Scalar>& subject, const Point2<Scalar>& a,
                                const Point2<Scalar>& b, Scalar side) {
  Polygon<Scalar> out;
  if (subject.empty()) return out;
  const Point2<Scalar> edge = b - a;
  auto distance = [&](const Point2<Scalar>& p) { return side * cross<Scalar>(edge, p - a); };
  for (std::size_t i = 0; i < subject.size(); ++i) {
    const Point2<Scalar>& cur = subject[i];
    const Point2<Scalar>& next = subject[(i + 1) % subject.size()];
    const Scalar dc = distance(cur);
    const Scalar dn = distance(next);
    if (dc >= 0) out.push_back(cur);
    if ((dc >= 0) != (dn >= 0)) {
      const Scalar t = dc / (dc - dn);
      out.push_back(cur + t * (next - cur));
    }
  }
  return out;
}

template <typename Scalar>
Polygon<Scalar> to_polygon(const CornerQuad<Scalar>& quad) {
  Polygon<Scalar> poly;
  for (int i = 0; i < 4; ++i) poly.emplace_back(quad.corner(i));
  return poly;
}

}  // namespace detail

/// Intersection polygon of two convex polygons (Sutherland-Hodgman).
template <typename Scalar>
Polygon<Scalar> clip_convex(const Polygon<Scalar>& subject, const Polygon<Scalar>& clip) {
  const Scalar side = signed_area(clip) >= 0 ? Scalar(1) : Scalar(-1);
  Polygon<Scalar> result = subject;
  for (std::size_t i = 0; i < clip.size() && !result.empty(); ++i) {
    result = detail::clip_half_plane(result, clip[i], clip[(i + 1) % clip.size()], side);
  }
  return result;
}

/// Exact IoU of two oriented rectangles by polygon clipping.
template <typename Scalar>
Scalar exact_rect_iou(const OrientedBox<Scalar>& a, const OrientedBox<Scalar>& b) {
  using std::abs;
  const auto pa = detail::to_polygon(decode_corners(a));
  const auto pb = detail::to_polygon(decode_corners(b));
  const Scalar area_a = Scalar(4) * a.r1 * a.r2;
  const Scalar area_b = Scalar(4) * b.r1 * b.r2;
  const auto inter_poly = clip_convex(pa, pb);
  Scalar inter = inter_poly.size() >= 3 ? abs(signed_area(inter_poly)) : Scalar(0);
  if (inter < Scalar(1e-12)) return 0;
  inter = std::min(inter, std::min(area_a, area_b));
  return inter / (area_a + area_b - inter);
}

/// True when `p` lies inside or on the ellipse inscribed in `box`.
template <typename Scalar>
bool in_ellipse(const OrientedBox<Scalar>& box, const Point2<Scalar>& p) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(box.phi);
  const Scalar s = sin(box.phi);
  const Scalar dx = p.x() - box.cx;
  const Scalar dy = p.y() - box.cy;
  const Scalar u = (c * dx + s * dy) / box.r1;
  const Scalar v = (-s * dx + c * dy) / box.r2;
  return u * u + v * v <= 1;
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

inline constexpr long kMinMonteCarloSamples = 10'000;

/// Hit-count estimate of the IoU of the two inscribed ellipses, sampling
/// uniformly over the bounding rectangle of both. Deterministic per seed.
MonteCarloEstimate mc_ellipse_iou(const OrientedBoxd& a, const OrientedBoxd& b, long samples,
                                  std::uint64_t seed);

struct Detection {
  OrientedBoxd box;
  double score = 0.0;
  int category = 0;
};

/// Greedy per-category suppression by exact rectangle IoU. Output is sorted
/// by descending score, ties broken by input position.
std::vector<Detection> rotated_nms(const std::vector<Detection>& detections,
                                   double iou_threshold);

}  // namespace jiou
