// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>

#include "jiou/errors.hpp"

namespace jiou {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

/// Oriented rectangle in image coordinates (x right, y down).
///
/// `r1` and `r2` are the half-lengths of the long and short side, `phi` is
/// the direction of the long side measured from +x towards +y. A canonical
/// box has r1 >= r2 > 0 and phi in (-pi/2, pi/2]; use canonicalize() to
/// obtain one from arbitrary parameters.
template <typename Scalar>
struct OrientedBox {
  Scalar cx{0};
  Scalar cy{0};
  Scalar r1{1};
  Scalar r2{1};
  Scalar phi{0};

  Point2<Scalar> center() const { return {cx, cy}; }

  template <typename NewScalar>
  OrientedBox<NewScalar> cast() const {
    return {static_cast<NewScalar>(cx), static_cast<NewScalar>(cy),
            static_cast<NewScalar>(r1), static_cast<NewScalar>(r2),
            static_cast<NewScalar>(phi)};
  }

  friend bool operator==(const OrientedBox&, const OrientedBox&) = default;
};

using OrientedBoxd = OrientedBox<double>;

/// Four corners stored column-wise, clockwise as seen in image coordinates.
template <typename Scalar>
struct CornerQuad {
  Eigen::Matrix<Scalar, 2, 4> corners = Eigen::Matrix<Scalar, 2, 4>::Zero();

  auto corner(Eigen::Index i) { return corners.col(i); }
  auto corner(Eigen::Index i) const { return corners.col(i); }
};

using CornerQuadd = CornerQuad<double>;

/// Sub-cell position of a center at output stride.
struct CenterOffset {
  double dx = 0.0;
  double dy = 0.0;
  long cell_x = 0;
  long cell_y = 0;
  long stride = 1;

  double cx() const { return (static_cast<double>(cell_x) + dx) * static_cast<double>(stride); }
  double cy() const { return (static_cast<double>(cell_y) + dy) * static_cast<double>(stride); }
};

/// Maps any finite angle into (-pi/2, pi/2].
template <typename Scalar>
Scalar wrap_half_turn(Scalar phi) {
  using std::remainder;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar wrapped = remainder(phi, pi);
  if (wrapped <= -pi / 2) wrapped += pi;
  return wrapped;
}

template <typename Scalar>
bool is_canonical(const OrientedBox<Scalar>& box) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  return std::isfinite(box.cx) && std::isfinite(box.cy) && box.r2 > 0 && box.r1 >= box.r2 &&
         box.phi > -pi / 2 && box.phi <= pi / 2;
}

/// Swaps the extents when the second is longer (rotating phi by a quarter
/// turn) and wraps phi into (-pi/2, pi/2]. The described point set is
/// unchanged. Squares keep their angle apart from the wrap.
template <typename Scalar>
OrientedBox<Scalar> canonicalize(const OrientedBox<Scalar>& raw) {
  using std::isfinite;
  if (!isfinite(raw.cx) || !isfinite(raw.cy) || !isfinite(raw.r1) || !isfinite(raw.r2) ||
      !isfinite(raw.phi)) {
    throw InvalidBoxError("box parameters must be finite");
  }
  if (!(raw.r1 > 0) || !(raw.r2 > 0)) {
    throw InvalidBoxError("box half-extents must be positive");
  }
  OrientedBox<Scalar> box = raw;
  if (box.r1 < box.r2) {
    std::swap(box.r1, box.r2);
    box.phi += std::numbers::pi_v<Scalar> / 2;
  }
  box.phi = wrap_half_turn(box.phi);
  return box;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> rotation(Scalar phi) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(phi);
  const Scalar s = sin(phi);
  Eigen::Matrix<Scalar, 2, 2> rot;
  rot << c, -s, s, c;
  return rot;
}

/// Corners of the box: the axis-aligned corners (-r1,-r2), (r1,-r2),
/// (r1,r2), (-r1,r2) rotated by phi and translated to the center.
template <typename Scalar>
CornerQuad<Scalar> decode_corners(const OrientedBox<Scalar>& box) {
  Eigen::Matrix<Scalar, 2, 4> local;
  local << -box.r1, box.r1, box.r1, -box.r1,  //
      -box.r2, -box.r2, box.r2, box.r2;
  CornerQuad<Scalar> quad;
  quad.corners = (rotation(box.phi) * local).colwise() + box.center();
  return quad;
}

/// Shoelace area with the sign convention of the image frame: negative for
/// a traversal that appears clockwise on screen (y pointing down).
template <typename Scalar>
Scalar image_signed_area(const CornerQuad<Scalar>& quad) {
  Scalar twice = 0;
  for (int i = 0; i < 4; ++i) {
    const auto p = quad.corner(i);
    const auto q = quad.corner((i + 1) % 4);
    twice += (q.x() - p.x()) * (q.y() + p.y());
  }
  return twice / 2;
}

/// Largest deviation from a right angle between consecutive edges, radians.
template <typename Scalar>
Scalar orthogonality_error(const CornerQuad<Scalar>& quad) {
  using std::abs;
  using std::atan2;
  Scalar worst = 0;
  for (int i = 0; i < 4; ++i) {
    const Point2<Scalar> e0 = quad.corner((i + 1) % 4) - quad.corner(i);
    const Point2<Scalar> e1 = quad.corner((i + 2) % 4) - quad.corner((i + 1) % 4);
    const Scalar cross = e0.x() * e1.y() - e0.y() * e1.x();
    const Scalar angle = atan2(abs(cross), e0.dot(e1));
    worst = std::max(worst, abs(angle - std::numbers::pi_v<Scalar> / 2));
  }
  return worst;
}

/// Quads whose corners deviate from right angles by more than this are
/// accepted but flagged.
inline constexpr double kOrthogonalityWarning = 0.05;

/// Fits an oriented box to a (near-)rectangular quad: centroid for the
/// center, averaged opposite edges for extents and direction.
template <typename Scalar>
OrientedBox<Scalar> corners_to_box(const CornerQuad<Scalar>& quad) {
  using std::abs;
  using std::atan2;
  if (!quad.corners.allFinite()) {
    throw DegenerateAnnotationError("quad has non-finite coordinates");
  }
  const Point2<Scalar> centroid = quad.corners.rowwise().mean();
  const Point2<Scalar> e0 = quad.corner(1) - quad.corner(0);
  const Point2<Scalar> e1 = quad.corner(2) - quad.corner(1);
  const Point2<Scalar> e2 = quad.corner(3) - quad.corner(2);
  const Point2<Scalar> e3 = quad.corner(0) - quad.corner(3);
  const Point2<Scalar> first = (e0 - e2) / 2;
  const Point2<Scalar> second = (e1 - e3) / 2;
  const Scalar first_len = first.norm();
  const Scalar second_len = second.norm();

  const Scalar scale = first_len + second_len;
  const Scalar area = abs(image_signed_area(quad));
  if (!(first_len > 0) || !(second_len > 0) || !(area > Scalar(1e-12) * scale * scale)) {
    throw DegenerateAnnotationError("quad is degenerate (zero area or collinear)");
  }

  const bool first_is_long = first_len >= second_len;
  const Point2<Scalar>& long_edge = first_is_long ? first : second;
  OrientedBox<Scalar> box;
  box.cx = centroid.x();
  box.cy = centroid.y();
  box.r1 = (first_is_long ? first_len : second_len) / 2;
  box.r2 = (first_is_long ? second_len : first_len) / 2;
  box.phi = atan2(long_edge.y(), long_edge.x());
  return canonicalize(box);
}

/// Splits a center into output-grid cell and fractional offset.
inline CenterOffset encode_offset(double cx, double cy, long stride) {
  if (stride < 1) throw InvalidBoxError("stride must be >= 1");
  if (!std::isfinite(cx) || !std::isfinite(cy)) throw InvalidBoxError("center must be finite");
  if (cx < 0 || cy < 0) throw OutOfImageError("center lies outside the image");
  const double sx = cx / static_cast<double>(stride);
  const double sy = cy / static_cast<double>(stride);
  const double fx = std::floor(sx);
  const double fy = std::floor(sy);
  return {sx - fx, sy - fy, static_cast<long>(fx), static_cast<long>(fy), stride};
}

}  // namespace jiou
