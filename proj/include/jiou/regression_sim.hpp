// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "jiou/jiou_loss.hpp"
#include "jiou/obb.hpp"

namespace jiou {

enum class LossKind { kJiou, kSmoothL1 };

LossKind parse_loss_kind(const std::string& name);
std::string to_string(LossKind kind);

inline constexpr double kConvergedIou = 0.95;
inline constexpr double kMinFitExtent = 0.1;
inline constexpr int kMaxStepHalvings = 10;

struct FitOptions {
  LossKind loss = LossKind::kJiou;
  Eigen::Index n = kDefaultDiscretization;
  double lr = 0.05;
  int max_iters = 500;
};

struct FitStep {
  int step = 0;
  double phi = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double loss = 0.0;
  double exact_iou = 0.0;
  bool projected = false;  // an extent was clamped back to kMinFitExtent
  int halvings = 0;
};

struct FitTrace {
  std::vector<FitStep> iterations;
  double final_exact_iou = 0.0;
  bool converged = false;
};

/// Loss of `pred` against `target` for the chosen kind. SmoothL1 compares
/// raw (phi, r1, r2) with mixed units, as a per-parameter regression would.
double fit_loss(const OrientedBoxd& pred, const OrientedBoxd& target, const FitOptions& options);
Eigen::Vector3d fit_gradient(const OrientedBoxd& pred, const OrientedBoxd& target,
                             const FitOptions& options);

/// Gradient descent on (phi, r1, r2) with both centers pinned to the
/// target's. A step that raises the loss is retried at half the rate, up to
/// kMaxStepHalvings times; if none is accepted the fit stops. The fit also
/// stops once the loss drops below 1e-12. Extents are projected to at least
/// kMinFitExtent and the box is re-canonicalized after every step.
FitTrace fit_box(const OrientedBoxd& init, const OrientedBoxd& target, const FitOptions& options);

void write_trace_csv(std::ostream& out, const FitTrace& trace);

struct FitSuiteCase {
  OrientedBoxd init;
  OrientedBoxd target;
  double final_exact_iou = 0.0;
  bool converged = false;
  std::size_t steps = 0;
};

struct FitSuiteResult {
  std::vector<FitSuiteCase> cases;
  int converged = 0;
};

/// Seeded random targets with aspect ratio in [1.5, 5] and initial angle
/// error up to 80 degrees, each fitted with `options`.
std::vector<std::pair<OrientedBoxd, OrientedBoxd>> make_fit_suite(std::uint64_t seed, int count);
FitSuiteResult run_fit_suite(std::uint64_t seed, int count, const FitOptions& options);

void write_suite_csv(std::ostream& out, const FitSuiteResult& result);

struct SweepRecord {
  double aspect_ratio = 1.0;
  double angle_diff = 0.0;
  Eigen::Index n = kDefaultDiscretization;
  double jiou_bar = 1.0;
  double rect_iou = 1.0;
  double ellipse_mc = 1.0;
  double ellipse_mc_std_error = 0.0;
  double dev_rect = 0.0;
  double dev_ellipse = 0.0;
};

struct SweepOptions {
  long samples = 1'000'000;
  std::uint64_t seed = 42;
};

/// Concentric pairs (ar, 1, 0) vs (ar, 1, angle) for every grid cell, rows
/// ordered by aspect ratio, then angle, then n. The Monte-Carlo reference is
/// drawn once per (aspect ratio, angle) cell with seed + cell index.
std::vector<SweepRecord> deviation_sweep(const std::vector<double>& aspect_ratios,
                                         const std::vector<double>& angle_diffs,
                                         const std::vector<Eigen::Index>& n_values,
                                         const SweepOptions& options = {});

/// Aspect ratios {1, 1.5, 2, 3, 5}, angles 0..pi/2 in steps of pi/36 and
/// n in {16, 64, 256, 720, 1024, 8192}.
std::vector<double> default_sweep_aspect_ratios();
std::vector<double> default_sweep_angles();
std::vector<Eigen::Index> default_sweep_n_values();

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);

}  // namespace jiou
