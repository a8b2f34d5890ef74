// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#include "jiou/obb.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "jiou/random.hpp"

namespace jiou {
namespace {

constexpr double kPi = std::numbers::pi;

OrientedBoxd random_box(std::mt19937_64& gen) {
  OrientedBoxd raw{uniform(gen, -100, 100), uniform(gen, -100, 100), uniform(gen, 0.5, 50),
                   uniform(gen, 0.5, 50), uniform(gen, -10, 10)};
  return raw;
}

// Smallest max-corner distance over the four cyclic relabelings.
double cyclic_corner_distance(const CornerQuadd& a, const CornerQuadd& b) {
  double best = std::numeric_limits<double>::infinity();
  for (int shift = 0; shift < 4; ++shift) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      worst = std::max(worst, (a.corner(i) - b.corner((i + shift) % 4)).norm());
    }
    best = std::min(best, worst);
  }
  return best;
}

TEST(CanonicalizeTest, SwapsExtentsAndRotatesQuarterTurn) {
  const auto box = canonicalize(OrientedBoxd{0, 0, 1, 2, 0});
  EXPECT_DOUBLE_EQ(box.r1, 2);
  EXPECT_DOUBLE_EQ(box.r2, 1);
  EXPECT_DOUBLE_EQ(box.phi, kPi / 2);
}

TEST(CanonicalizeTest, HalfTurnIsIdentity) {
  const auto box = canonicalize(OrientedBoxd{0, 0, 2, 1, kPi});
  EXPECT_DOUBLE_EQ(box.r1, 2);
  EXPECT_DOUBLE_EQ(box.r2, 1);
  EXPECT_NEAR(box.phi, 0.0, 1e-15);
}

TEST(CanonicalizeTest, WrapsLargeAngleKeepingPointSet) {
  const OrientedBoxd raw{0, 0, 3, 1, 2.0};
  const auto box = canonicalize(raw);
  EXPECT_NEAR(box.phi, 2.0 - kPi, 1e-15);
  EXPECT_NEAR(box.phi, -1.1416, 1e-4);
  EXPECT_LT(cyclic_corner_distance(decode_corners(raw), decode_corners(box)), 1e-9);
}

TEST(CanonicalizeTest, RangeIsHalfOpen) {
  EXPECT_DOUBLE_EQ(canonicalize(OrientedBoxd{0, 0, 2, 1, -kPi / 2}).phi, kPi / 2);
  EXPECT_DOUBLE_EQ(canonicalize(OrientedBoxd{0, 0, 2, 1, kPi / 2}).phi, kPi / 2);
}

TEST(CanonicalizeTest, SquareKeepsAngle) {
  EXPECT_DOUBLE_EQ(canonicalize(OrientedBoxd{0, 0, 1, 1, 0.3}).phi, 0.3);
  EXPECT_DOUBLE_EQ(canonicalize(OrientedBoxd{0, 0, 1, 1, 0.3 + kPi}).phi,
                   wrap_half_turn(0.3 + kPi));
}

TEST(CanonicalizeTest, RejectsInvalidInput) {
  EXPECT_THROW(canonicalize(OrientedBoxd{0, 0, 0, 1, 0}), InvalidBoxError);
  EXPECT_THROW(canonicalize(OrientedBoxd{0, 0, 1, -1, 0}), InvalidBoxError);
  EXPECT_THROW(canonicalize(OrientedBoxd{0, 0, 1, 1, std::nan("")}), InvalidBoxError);
  EXPECT_THROW(canonicalize(OrientedBoxd{std::numeric_limits<double>::infinity(), 0, 1, 1, 0}),
               InvalidBoxError);
}

TEST(CanonicalizeTest, IdempotentAndPreservesPointSet) {
  std::mt19937_64 gen(7);
  for (int k = 0; k < 1000; ++k) {
    const OrientedBoxd raw = random_box(gen);
    const auto once = canonicalize(raw);
    EXPECT_TRUE(is_canonical(once));
    EXPECT_EQ(canonicalize(once), once);
    EXPECT_LT(cyclic_corner_distance(decode_corners(raw), decode_corners(once)), 1e-9);
  }
}

TEST(DecodeCornersTest, AxisAligned) {
  const auto quad = decode_corners(OrientedBoxd{10, 10, 2, 1, 0});
  Eigen::Matrix<double, 2, 4> expected;
  expected << 8, 12, 12, 8,  //
      9, 9, 11, 11;
  EXPECT_TRUE(quad.corners.isApprox(expected, 1e-15));
}

TEST(DecodeCornersTest, QuarterTurn) {
  const auto quad = decode_corners(OrientedBoxd{0, 0, 2, 1, kPi / 2});
  Eigen::Matrix<double, 2, 4> expected;
  expected << 1, 1, -1, -1,  //
      -2, 2, 2, -2;
  EXPECT_LT((quad.corners - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DecodeCornersTest, EighthTurnMatchesHandRotation) {
  const double c = std::cos(kPi / 4);
  const double s = std::sin(kPi / 4);
  const double local[4][2] = {{-2, -1}, {2, -1}, {2, 1}, {-2, 1}};
  const auto quad = decode_corners(OrientedBoxd{0, 0, 2, 1, kPi / 4});
  for (int i = 0; i < 4; ++i) {
    const double x = c * local[i][0] - s * local[i][1];
    const double y = s * local[i][0] + c * local[i][1];
    EXPECT_NEAR(quad.corner(i).x(), x, 1e-15);
    EXPECT_NEAR(quad.corner(i).y(), y, 1e-15);
  }
}

TEST(DecodeCornersTest, ClockwiseRectangleWithExactEdges) {
  std::mt19937_64 gen(11);
  for (int k = 0; k < 1000; ++k) {
    const auto box = canonicalize(random_box(gen));
    const auto quad = decode_corners(box);
    EXPECT_LT(image_signed_area(quad), 0.0);
    EXPECT_NEAR(std::abs(image_signed_area(quad)), 4 * box.r1 * box.r2, 1e-9 * box.r1 * box.r2);
    EXPECT_LT(orthogonality_error(quad), 1e-9);
    for (int i = 0; i < 4; ++i) {
      const double edge = (quad.corner((i + 1) % 4) - quad.corner(i)).norm();
      EXPECT_NEAR(edge, i % 2 == 0 ? 2 * box.r1 : 2 * box.r2, 1e-9);
      const double opposite = (quad.corner((i + 3) % 4) - quad.corner((i + 2) % 4)).norm();
      EXPECT_NEAR(edge, opposite, 1e-9);
    }
  }
}

TEST(CornersToBoxTest, AxisAlignedRectangle) {
  CornerQuadd quad;
  quad.corners << 0, 4, 4, 0,  //
      0, 0, 2, 2;
  const auto box = corners_to_box(quad);
  EXPECT_DOUBLE_EQ(box.cx, 2);
  EXPECT_DOUBLE_EQ(box.cy, 1);
  EXPECT_DOUBLE_EQ(box.r1, 2);
  EXPECT_DOUBLE_EQ(box.r2, 1);
  EXPECT_DOUBLE_EQ(box.phi, 0);
}

TEST(CornersToBoxTest, RoundTripsDecodedCorners) {
  std::mt19937_64 gen(13);
  for (int k = 0; k < 1000; ++k) {
    const auto box = canonicalize(random_box(gen));
    if (std::abs(box.r1 - box.r2) < 1e-6) continue;
    const auto back = corners_to_box(decode_corners(box));
    EXPECT_NEAR(back.cx, box.cx, 1e-6);
    EXPECT_NEAR(back.cy, box.cy, 1e-6);
    EXPECT_NEAR(back.r1, box.r1, 1e-6);
    EXPECT_NEAR(back.r2, box.r2, 1e-6);
    // Both angles are canonical; compare on the half-turn circle.
    EXPECT_NEAR(wrap_half_turn(back.phi - box.phi + 1e-3) - 1e-3, 0.0, 1e-6);
  }
}

TEST(CornersToBoxTest, JitteredRectangleStaysClose) {
  std::mt19937_64 gen(17);
  for (int k = 0; k < 200; ++k) {
    const auto box = canonicalize(OrientedBoxd{uniform(gen, 50, 500), uniform(gen, 50, 500),
                                               uniform(gen, 5, 50), uniform(gen, 2, 5),
                                               uniform(gen, -kPi, kPi)});
    CornerQuadd quad = decode_corners(box);
    for (int i = 0; i < 4; ++i) {
      quad.corner(i) += Point2<double>(uniform(gen, -0.01, 0.01), uniform(gen, -0.01, 0.01));
    }
    const auto redecoded = decode_corners(corners_to_box(quad));
    EXPECT_LT((redecoded.corners - quad.corners).cwiseAbs().maxCoeff(), 0.05);
  }
}

TEST(CornersToBoxTest, SquareTakesFirstEdgeDirection) {
  CornerQuadd quad;
  quad.corners << 0, 0, -2, -2,  //
      0, 2, 2, 0;
  const auto box = corners_to_box(quad);
  EXPECT_DOUBLE_EQ(box.r1, box.r2);
  EXPECT_NEAR(box.phi, kPi / 2, 1e-15);
}

TEST(CornersToBoxTest, RejectsDegenerateQuads) {
  CornerQuadd collinear;
  collinear.corners << 0, 1, 2, 3,  //
      0, 0, 0, 0;
  EXPECT_THROW(corners_to_box(collinear), DegenerateAnnotationError);
  CornerQuadd point;
  EXPECT_THROW(corners_to_box(point), DegenerateAnnotationError);
}

TEST(CornersToBoxTest, FlagsNonRectangles) {
  CornerQuadd skewed;
  skewed.corners << 0, 4, 5, 1,  //
      0, 0, 2, 2;
  EXPECT_GT(orthogonality_error(skewed), kOrthogonalityWarning);
  EXPECT_NO_THROW(corners_to_box(skewed));
}

TEST(EncodeOffsetTest, Arithmetic) {
  auto o = encode_offset(101, 53, 4);
  EXPECT_EQ(o.cell_x, 25);
  EXPECT_EQ(o.cell_y, 13);
  EXPECT_DOUBLE_EQ(o.dx, 0.25);
  EXPECT_DOUBLE_EQ(o.dy, 0.25);

  o = encode_offset(8, 8, 4);
  EXPECT_EQ(o.cell_x, 2);
  EXPECT_EQ(o.cell_y, 2);
  EXPECT_EQ(o.dx, 0.0);
  EXPECT_EQ(o.dy, 0.0);

  o = encode_offset(607.9, 0.1, 4);
  EXPECT_EQ(o.cell_x, 151);
  EXPECT_EQ(o.cell_y, 0);
  EXPECT_NEAR(o.dx, 0.975, 1e-12);
  EXPECT_NEAR(o.dy, 0.025, 1e-12);
}

TEST(EncodeOffsetTest, ReconstructsCenter) {
  std::mt19937_64 gen(19);
  for (int k = 0; k < 1000; ++k) {
    const double cx = uniform(gen, 0, 2000);
    const double cy = uniform(gen, 0, 2000);
    const long stride = 1 + static_cast<long>(gen() % 16);
    const auto o = encode_offset(cx, cy, stride);
    EXPECT_GE(o.dx, 0.0);
    EXPECT_LT(o.dx, 1.0);
    EXPECT_GE(o.dy, 0.0);
    EXPECT_LT(o.dy, 1.0);
    EXPECT_NEAR(o.cx(), cx, 1e-9);
    EXPECT_NEAR(o.cy(), cy, 1e-9);
  }
}

TEST(EncodeOffsetTest, RejectsNegativeCoordinates) {
  EXPECT_THROW(encode_offset(-1, 3, 4), OutOfImageError);
  EXPECT_THROW(encode_offset(1, -0.5, 4), OutOfImageError);
}

}  // namespace
}  // namespace jiou
