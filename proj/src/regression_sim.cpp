// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#include "jiou/regression_sim.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "jiou/csv.hpp"
#include "jiou/errors.hpp"
#include "jiou/iou_oracle.hpp"
#include "jiou/random.hpp"
#include "jiou/target_codec.hpp"

namespace jiou {
namespace {

constexpr double kStationaryLoss = 1e-12;

Eigen::Vector3d params_of(const OrientedBoxd& box) { return {box.phi, box.r1, box.r2}; }

}  // namespace

LossKind parse_loss_kind(const std::string& name) {
  if (name == "jiou") return LossKind::kJiou;
  if (name == "smooth_l1" || name == "smoothl1") return LossKind::kSmoothL1;
  throw Error("unknown loss kind '" + name + "' (expected jiou or smooth_l1)");
}

std::string to_string(LossKind kind) { return kind == LossKind::kJiou ? "jiou" : "smooth_l1"; }

double fit_loss(const OrientedBoxd& pred, const OrientedBoxd& target, const FitOptions& options) {
  if (options.loss == LossKind::kJiou) return jiou_loss(pred, target, options.n).loss;
  const Eigen::Vector3d diff = params_of(pred) - params_of(target);
  return smooth_l1(diff[0]) + smooth_l1(diff[1]) + smooth_l1(diff[2]);
}

Eigen::Vector3d fit_gradient(const OrientedBoxd& pred, const OrientedBoxd& target,
                             const FitOptions& options) {
  if (options.loss == LossKind::kJiou) return jiou_gradient(pred, target, options.n).vector();
  const Eigen::Vector3d diff = params_of(pred) - params_of(target);
  return diff.cwiseMax(-1.0).cwiseMin(1.0);
}

FitTrace fit_box(const OrientedBoxd& init, const OrientedBoxd& target, const FitOptions& options) {
  if (!(options.lr > 0)) throw Error("learning rate must be positive");
  if (options.max_iters < 1) throw Error("max_iters must be >= 1");
  check_discretization(options.n);

  const OrientedBoxd goal = canonicalize(target);
  OrientedBoxd pred = canonicalize(init);
  pred.cx = goal.cx;
  pred.cy = goal.cy;

  FitTrace trace;
  double loss = fit_loss(pred, goal, options);
  trace.iterations.push_back({0, pred.phi, pred.r1, pred.r2, loss, exact_rect_iou(pred, goal)});

  for (int step = 1; step <= options.max_iters && loss > kStationaryLoss; ++step) {
    const Eigen::Vector3d grad = fit_gradient(pred, goal, options);
    double rate = options.lr;
    bool accepted = false;
    for (int halvings = 0; halvings <= kMaxStepHalvings; ++halvings, rate /= 2) {
      const Eigen::Vector3d next = params_of(pred) - rate * grad;
      OrientedBoxd candidate = pred;
      candidate.phi = next[0];
      candidate.r1 = next[1];
      candidate.r2 = next[2];
      const bool projected = candidate.r1 < kMinFitExtent || candidate.r2 < kMinFitExtent;
      candidate.r1 = std::max(candidate.r1, kMinFitExtent);
      candidate.r2 = std::max(candidate.r2, kMinFitExtent);
      candidate = canonicalize(candidate);
      const double candidate_loss = fit_loss(candidate, goal, options);
      if (candidate_loss <= loss) {
        pred = candidate;
        loss = candidate_loss;
        trace.iterations.push_back({step, pred.phi, pred.r1, pred.r2, loss,
                                    exact_rect_iou(pred, goal), projected, halvings});
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  trace.final_exact_iou = trace.iterations.back().exact_iou;
  trace.converged = trace.final_exact_iou >= kConvergedIou;
  return trace;
}

void write_trace_csv(std::ostream& out, const FitTrace& trace) {
  out << "step,phi,r1,r2,loss,exact_iou\n";
  for (const FitStep& s : trace.iterations) {
    write_csv_row(out, {std::to_string(s.step), format_real(s.phi), format_real(s.r1),
                        format_real(s.r2), format_real(s.loss), format_real(s.exact_iou)});
  }
}

std::vector<std::pair<OrientedBoxd, OrientedBoxd>> make_fit_suite(std::uint64_t seed, int count) {
  constexpr double pi = std::numbers::pi;
  constexpr double max_angle_error = 80.0 * pi / 180.0;
  std::mt19937_64 gen(seed);
  std::vector<std::pair<OrientedBoxd, OrientedBoxd>> suite;
  for (int k = 0; k < count; ++k) {
    const double aspect = uniform(gen, 1.5, 5.0);
    const double short_half = uniform(gen, 1.0, 2.0);
    OrientedBoxd target{0.0, 0.0, aspect * short_half, short_half, uniform(gen, -pi / 2, pi / 2)};
    OrientedBoxd init = target;
    init.phi += uniform(gen, -max_angle_error, max_angle_error);
    init.r1 *= uniform(gen, 0.8, 1.2);
    init.r2 *= uniform(gen, 0.8, 1.2);
    suite.emplace_back(canonicalize(init), canonicalize(target));
  }
  return suite;
}

FitSuiteResult run_fit_suite(std::uint64_t seed, int count, const FitOptions& options) {
  FitSuiteResult result;
  for (const auto& [init, target] : make_fit_suite(seed, count)) {
    const FitTrace trace = fit_box(init, target, options);
    result.cases.push_back(
        {init, target, trace.final_exact_iou, trace.converged, trace.iterations.size()});
    result.converged += trace.converged ? 1 : 0;
  }
  return result;
}

void write_suite_csv(std::ostream& out, const FitSuiteResult& result) {
  out << "case,init_phi,init_r1,init_r2,target_phi,target_r1,target_r2,steps,final_exact_iou,"
         "converged\n";
  for (std::size_t k = 0; k < result.cases.size(); ++k) {
    const FitSuiteCase& c = result.cases[k];
    write_csv_row(out, {std::to_string(k), format_real(c.init.phi), format_real(c.init.r1),
                        format_real(c.init.r2), format_real(c.target.phi),
                        format_real(c.target.r1), format_real(c.target.r2),
                        std::to_string(c.steps), format_real(c.final_exact_iou),
                        c.converged ? "1" : "0"});
  }
}

std::vector<SweepRecord> deviation_sweep(const std::vector<double>& aspect_ratios,
                                         const std::vector<double>& angle_diffs,
                                         const std::vector<Eigen::Index>& n_values,
                                         const SweepOptions& options) {
  if (aspect_ratios.empty() || angle_diffs.empty() || n_values.empty()) {
    throw Error("sweep grids must be non-empty");
  }
  std::vector<SweepRecord> records;
  std::uint64_t cell = 0;
  for (double aspect : aspect_ratios) {
    for (double angle : angle_diffs) {
      const OrientedBoxd a = canonicalize(OrientedBoxd{0.0, 0.0, aspect, 1.0, 0.0});
      const OrientedBoxd b = canonicalize(OrientedBoxd{0.0, 0.0, aspect, 1.0, angle});
      const double rect = exact_rect_iou(a, b);
      const MonteCarloEstimate mc = mc_ellipse_iou(a, b, options.samples, options.seed + cell++);
      for (Eigen::Index n : n_values) {
        SweepRecord r;
        r.aspect_ratio = aspect;
        r.angle_diff = angle;
        r.n = n;
        r.jiou_bar = jiou_bar(a, b, n).ratio;
        r.rect_iou = rect;
        r.ellipse_mc = mc.estimate;
        r.ellipse_mc_std_error = mc.std_error;
        r.dev_rect = std::abs(r.jiou_bar - rect);
        r.dev_ellipse = std::abs(r.jiou_bar - mc.estimate);
        records.push_back(r);
      }
    }
  }
  return records;
}

std::vector<double> default_sweep_aspect_ratios() { return {1.0, 1.5, 2.0, 3.0, 5.0}; }

std::vector<double> default_sweep_angles() {
  std::vector<double> angles;
  for (int k = 0; k <= 18; ++k) angles.push_back(k * std::numbers::pi / 36.0);
  return angles;
}

std::vector<Eigen::Index> default_sweep_n_values() { return {16, 64, 256, 720, 1024, 8192}; }

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "aspect_ratio,angle_diff,n,jiou_bar,rect_iou,ellipse_mc,dev_rect,dev_ellipse\n";
  for (const SweepRecord& r : records) {
    write_csv_row(out, {format_real(r.aspect_ratio), format_real(r.angle_diff),
                        std::to_string(r.n), format_real(r.jiou_bar), format_real(r.rect_iou),
                        format_real(r.ellipse_mc), format_real(r.dev_rect),
                        format_real(r.dev_ellipse)});
  }
}

}  // namespace jiou
