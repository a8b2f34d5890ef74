// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: JIoU of box pairs, deviation sweeps, box fits,
// DOTA encode/decode round trips, rotated NMS and a heatmap demo.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jiou/csv.hpp"
#include "jiou/dota.hpp"
#include "jiou/errors.hpp"
#include "jiou/iou_oracle.hpp"
#include "jiou/jiou_loss.hpp"
#include "jiou/obb.hpp"
#include "jiou/random.hpp"
#include "jiou/regression_sim.hpp"
#include "jiou/target_codec.hpp"

namespace {

using jiou::format_real;
using jiou::OrientedBoxd;

constexpr int kExitFailures = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUnwritable = 3;

struct CliConfig {
  long n = jiou::kDefaultDiscretization;
  double mu = jiou::kDefaultMu;
  long stride = jiou::kDefaultStride;
  double alpha = jiou::kDefaultFocalAlpha;
  double gamma = jiou::kDefaultFocalGamma;
  double nms_iou = 0.1;
  std::uint64_t seed = 42;
  std::string out;
  bool degrees = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnwritableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_reals(const std::string& text, char sep) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(sep, start);
    if (end == std::string::npos) end = text.size();
    const char* first = text.data() + start;
    const char* last = text.data() + end;
    while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
    while (last > first && std::isspace(static_cast<unsigned char>(last[-1]))) --last;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last) {
      throw UsageError("not a number: '" + std::string(text.data() + start, text.data() + end) +
                       "'");
    }
    values.push_back(value);
    start = end + 1;
  }
  return values;
}

OrientedBoxd parse_box_spec(const std::string& spec, bool degrees) {
  const auto values = parse_reals(spec, ',');
  if (values.size() != 5) throw UsageError("box spec must be cx,cy,r1,r2,phi: '" + spec + "'");
  OrientedBoxd box{values[0], values[1], values[2], values[3], values[4]};
  if (degrees) box.phi *= std::numbers::pi / 180.0;
  try {
    return jiou::canonicalize(box);
  } catch (const jiou::InvalidBoxError& e) {
    throw UsageError(std::string("invalid box '") + spec + "': " + e.what());
  }
}

// Report sink: the --out file when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw UnwritableError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    if (file_) {
      file_->close();
      if (!*file_) throw UnwritableError("write failed");
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void add_common_flags(CLI::App& app, CliConfig& config) {
  app.add_option("--n", config.n, "Polar discretization count")->check(CLI::Range(4L, 1L << 24));
  app.add_option("--mu", config.mu, "Weight of the JIoU term in the total loss");
  app.add_option("--stride", config.stride, "Output stride")->check(CLI::Range(1L, 1024L));
  app.add_option("--alpha", config.alpha, "Focal loss negative-weight exponent");
  app.add_option("--gamma", config.gamma, "Focal loss focusing exponent");
  app.add_option("--nms-iou", config.nms_iou, "NMS IoU threshold")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", config.seed, "Random seed");
  app.add_option("--out", config.out, "Output file (stdout when omitted)");
  app.add_flag("--degrees", config.degrees, "Angles on the command line are in degrees");
}

// ---------------------------------------------------------------------------

int cmd_jiou(const CliConfig& config, const std::string& pred_spec, const std::string& target_spec) {
  const OrientedBoxd pred = parse_box_spec(pred_spec, config.degrees);
  const OrientedBoxd target = parse_box_spec(target_spec, config.degrees);
  const auto value = jiou::jiou_loss(pred, target, config.n);
  const auto grad = jiou::jiou_gradient(pred, target, config.n);
  Output out(config.out);
  auto& os = out.stream();
  os << "n=" << config.n << '\n';
  os << "ratio=" << format_real(value.ratio) << '\n';
  os << "loss=" << format_real(value.loss) << '\n';
  os << "d_phi=" << format_real(grad.d_phi) << '\n';
  os << "d_r1=" << format_real(grad.d_r1) << '\n';
  os << "d_r2=" << format_real(grad.d_r2) << '\n';
  out.close();
  return 0;
}

int cmd_sweep(const CliConfig& config, long samples) {
  if (config.out.empty()) throw UsageError("sweep requires --out");
  Output out(config.out);
  const auto records = jiou::deviation_sweep(
      jiou::default_sweep_aspect_ratios(), jiou::default_sweep_angles(),
      jiou::default_sweep_n_values(), jiou::SweepOptions{samples, config.seed});
  jiou::write_sweep_csv(out.stream(), records);
  out.close();
  double worst = 0.0;
  for (const auto& r : records) {
    if (r.n == 720) worst = std::max(worst, r.dev_ellipse);
  }
  std::cout << "rows=" << records.size() << " max_dev_ellipse_n720=" << format_real(worst)
            << '\n';
  return 0;
}

struct RoundtripStats {
  std::size_t records = 0;
  std::size_t failures = 0;
  std::size_t orthogonality_warnings = 0;
  double max_field_error[5] = {0, 0, 0, 0, 0};
  double max_corner_error = 0.0;
};

int cmd_roundtrip(const CliConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  const jiou::DotaFile file = jiou::read_dota(in);
  for (const auto& err : file.errors) std::cerr << "parse error: " << err.what() << '\n';

  constexpr double tolerance = 1e-6;
  RoundtripStats stats;
  std::vector<std::string> failure_lines;
  for (const jiou::DotaRecord& record : file.records) {
    ++stats.records;
    bool failed = false;
    try {
      const OrientedBoxd box = jiou::corners_to_box(record.quad);
      if (jiou::orthogonality_error(record.quad) > jiou::kOrthogonalityWarning) {
        ++stats.orthogonality_warnings;
      }
      const jiou::LabeledBox object{box, 0};
      const long width = static_cast<long>(std::floor(box.cx / config.stride)) + 2;
      const long height = static_cast<long>(std::floor(box.cy / config.stride)) + 2;
      const auto targets = jiou::encode_targets(std::span(&object, 1), 1, height, width,
                                                config.stride);
      const auto peaks = jiou::extract_peaks(targets.heatmap.values, 1, 0.5);
      const auto dets = jiou::decode_detections(peaks, targets.offset, targets.params,
                                                config.stride);
      if (dets.size() != 1) {
        failed = true;
      } else {
        const OrientedBoxd& got = dets.front().box;
        const double errors[5] = {std::abs(got.cx - box.cx), std::abs(got.cy - box.cy),
                                  std::abs(got.r1 - box.r1), std::abs(got.r2 - box.r2),
                                  std::abs(got.phi - box.phi)};
        const auto corners = jiou::decode_corners(got);
        const double corner_error = (corners.corners - record.quad.corners).cwiseAbs().maxCoeff();
        for (int f = 0; f < 5; ++f) {
          stats.max_field_error[f] = std::max(stats.max_field_error[f], errors[f]);
          failed = failed || errors[f] > tolerance;
        }
        stats.max_corner_error = std::max(stats.max_corner_error, corner_error);
        failed = failed || corner_error > tolerance;
      }
    } catch (const jiou::Error& e) {
      std::cerr << "line " << record.line << ": " << e.what() << '\n';
      failed = true;
    }
    if (failed) {
      ++stats.failures;
      failure_lines.push_back(std::to_string(record.line));
    }
  }

  Output out(config.out);
  auto& os = out.stream();
  os << "records=" << stats.records << '\n';
  os << "parse_errors=" << file.errors.size() << '\n';
  os << "failures=" << stats.failures << '\n';
  os << "orthogonality_warnings=" << stats.orthogonality_warnings << '\n';
  const char* names[5] = {"cx", "cy", "r1", "r2", "phi"};
  for (int f = 0; f < 5; ++f) {
    os << "max_error_" << names[f] << '=' << format_real(stats.max_field_error[f]) << '\n';
  }
  os << "max_corner_error=" << format_real(stats.max_corner_error) << '\n';
  for (const auto& e : file.errors) os << "parse_error_line=" << e.line() << '\n';
  for (const auto& line : failure_lines) os << "failure_line=" << line << '\n';
  out.close();
  return file.errors.empty() ? 0 : kExitFailures;
}

int cmd_fit(const CliConfig& config, const std::string& init_spec, const std::string& target_spec,
            const std::string& loss_name, double lr, int max_iters, int suite) {
  jiou::FitOptions options;
  try {
    options.loss = jiou::parse_loss_kind(loss_name);
  } catch (const jiou::Error& e) {
    throw UsageError(e.what());
  }
  options.n = config.n;
  options.lr = lr;
  options.max_iters = max_iters;

  if (suite > 0) {
    const auto result = jiou::run_fit_suite(config.seed, suite, options);
    Output out(config.out);
    jiou::write_suite_csv(out.stream(), result);
    out.close();
    std::cout << "converged=" << result.converged << '/' << result.cases.size() << '\n';
    return 0;
  }

  if (init_spec.empty() || target_spec.empty()) {
    throw UsageError("fit requires --init and --target (or --suite)");
  }
  const OrientedBoxd init = parse_box_spec(init_spec, config.degrees);
  const OrientedBoxd target = parse_box_spec(target_spec, config.degrees);
  const jiou::FitTrace trace = jiou::fit_box(init, target, options);
  Output out(config.out);
  jiou::write_trace_csv(out.stream(), trace);
  out.close();
  std::ostream& summary = config.out.empty() ? std::cerr : std::cout;
  summary << "converged=" << (trace.converged ? 1 : 0)
          << " final_exact_iou=" << format_real(trace.final_exact_iou)
          << " steps=" << trace.iterations.size() << '\n';
  return 0;
}

std::vector<jiou::Detection> read_detections(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::vector<jiou::Detection> dets;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("cx")) continue;
    std::vector<double> v;
    try {
      v = parse_reals(line, ',');
    } catch (const UsageError& e) {
      throw UsageError("line " + std::to_string(line_number) + ": " + e.what());
    }
    if (v.size() != 7) {
      throw UsageError("line " + std::to_string(line_number) +
                       ": expected cx,cy,r1,r2,phi,score,category");
    }
    OrientedBoxd box{v[0], v[1], v[2], v[3], v[4]};
    try {
      box = jiou::canonicalize(box);
    } catch (const jiou::Error& e) {
      throw UsageError("line " + std::to_string(line_number) + ": " + e.what());
    }
    dets.push_back({box, v[5], static_cast<int>(v[6])});
  }
  return dets;
}

void write_detections(std::ostream& os, const std::vector<jiou::Detection>& dets) {
  os << "cx,cy,r1,r2,phi,score,category\n";
  for (const auto& d : dets) {
    jiou::write_csv_row(os, {format_real(d.box.cx), format_real(d.box.cy), format_real(d.box.r1),
                             format_real(d.box.r2), format_real(d.box.phi), format_real(d.score),
                             std::to_string(d.category)});
  }
}

int cmd_nms(const CliConfig& config, const std::string& in_path) {
  const auto dets = read_detections(in_path);
  const auto kept = jiou::rotated_nms(dets, config.nms_iou);
  Output out(config.out);
  write_detections(out.stream(), kept);
  out.close();
  std::cerr << "kept=" << kept.size() << '/' << dets.size() << '\n';
  return 0;
}

int cmd_heatmap_demo(const CliConfig& config, const std::string& in_path, long image_size,
                     int count) {
  std::vector<jiou::LabeledBox> objects;
  int classes = 1;
  if (!in_path.empty()) {
    std::ifstream in(in_path);
    if (!in) throw UsageError("cannot read '" + in_path + "'");
    const auto file = jiou::read_dota(in);
    for (const auto& e : file.errors) std::cerr << "parse error: " << e.what() << '\n';
    std::set<std::string> names;
    for (const auto& r : file.records) names.insert(r.category);
    std::map<std::string, int> ids;
    for (const auto& name : names) ids.emplace(name, static_cast<int>(ids.size()));
    classes = std::max(1, static_cast<int>(ids.size()));
    for (const auto& r : file.records) objects.push_back({jiou::corners_to_box(r.quad), ids[r.category]});
  } else {
    std::mt19937_64 gen(config.seed);
    const double margin = 2.0 * config.stride;
    for (int k = 0; k < count; ++k) {
      const double r2 = jiou::uniform(gen, 4.0, 12.0);
      objects.push_back({jiou::canonicalize(OrientedBoxd{
                             jiou::uniform(gen, margin, image_size - margin),
                             jiou::uniform(gen, margin, image_size - margin),
                             r2 * jiou::uniform(gen, 1.0, 4.0), r2,
                             jiou::uniform(gen, -std::numbers::pi / 2, std::numbers::pi / 2)}),
                         0});
    }
  }
  double max_x = image_size;
  double max_y = image_size;
  for (const auto& o : objects) {
    max_x = std::max(max_x, o.box.cx + 1);
    max_y = std::max(max_y, o.box.cy + 1);
  }
  const long width = static_cast<long>(std::ceil(max_x / config.stride));
  const long height = static_cast<long>(std::ceil(max_y / config.stride));
  const auto targets = jiou::encode_targets(objects, classes, height, width, config.stride);

  // A deterministic imperfect "prediction": attenuated heatmap and jittered
  // regression tuples.
  std::mt19937_64 gen(config.seed + 1);
  jiou::PlaneStack pred_heat;
  for (const auto& plane : targets.heatmap.values) pred_heat.push_back(0.8 * plane + 0.01);
  jiou::RegressionTuples pred_tuples;
  std::vector<OrientedBoxd> pred_boxes;
  std::vector<OrientedBoxd> true_boxes;
  for (const auto& t : targets.regression.tuples) {
    jiou::RegressionTuple p = t;
    p[0] += jiou::uniform(gen, -0.1, 0.1);
    p[1] *= jiou::uniform(gen, 0.9, 1.1);
    p[2] *= jiou::uniform(gen, 0.9, 1.1);
    pred_tuples.push_back(p);
    pred_boxes.push_back(jiou::canonicalize(OrientedBoxd{0, 0, p[1], p[2], p[0]}));
    true_boxes.push_back(OrientedBoxd{0, 0, t[1], t[2], t[0]});
  }
  const double cla = jiou::focal_loss(pred_heat, targets.heatmap, config.alpha, config.gamma);
  const double jiou_term =
      pred_boxes.empty() ? 0.0
                         : jiou::batch_jiou<double>(pred_boxes, true_boxes, config.n).mean_loss;
  const double reg = jiou::smooth_l1(pred_tuples, targets.regression.tuples);
  const auto report = jiou::total_loss(cla, jiou_term, reg, config.mu);

  const auto peaks = jiou::extract_peaks(targets.heatmap.values);
  const auto dets = jiou::decode_detections(peaks, targets.offset, targets.params, config.stride);

  std::cout << "objects=" << objects.size() << " grid=" << width << 'x' << height
            << " detections=" << dets.size() << '\n';
  std::cout << "cla=" << format_real(report.classification) << " jiou=" << format_real(report.jiou)
            << " reg=" << format_real(report.regression) << " mu=" << format_real(report.mu)
            << " total=" << format_real(report.total) << '\n';
  Output out(config.out);
  write_detections(out.stream(), dets);
  out.close();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete polar JIoU loss toolkit for oriented boxes"};
  app.require_subcommand(1);
  app.fallthrough();
  CliConfig config;
  add_common_flags(app, config);

  std::string pred_spec, target_spec, init_spec, loss_name = "jiou", in_path;
  long samples = 1'000'000;
  double lr = 0.05;
  int max_iters = 500;
  int suite = 0;
  long image_size = 256;
  int count = 8;

  auto* jiou_cmd = app.add_subcommand("jiou", "JIoU ratio, loss and gradient of a box pair");
  jiou_cmd->add_option("--pred", pred_spec, "Predicted box cx,cy,r1,r2,phi")->required();
  jiou_cmd->add_option("--target", target_spec, "Target box cx,cy,r1,r2,phi")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Deviation sweep of JIoU against exact IoUs (CSV)");
  sweep_cmd->add_option("--samples", samples, "Monte-Carlo samples per cell")
      ->check(CLI::Range(jiou::kMinMonteCarloSamples, 1L << 40));

  auto* roundtrip_cmd =
      app.add_subcommand("roundtrip", "Encode/decode every box of a DOTA annotation file");
  roundtrip_cmd->add_option("file", in_path, "DOTA annotation file")->required();

  auto* fit_cmd = app.add_subcommand("fit", "Gradient-descent box fit (CSV trace)");
  fit_cmd->add_option("--init", init_spec, "Initial box cx,cy,r1,r2,phi");
  fit_cmd->add_option("--target", target_spec, "Target box cx,cy,r1,r2,phi");
  fit_cmd->add_option("--loss", loss_name, "jiou or smooth_l1");
  fit_cmd->add_option("--lr", lr, "Learning rate")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--max-iters", max_iters, "Iteration cap")->check(CLI::Range(1, 1 << 30));
  fit_cmd->add_option("--suite", suite, "Run the seeded random suite with this many targets");

  auto* nms_cmd = app.add_subcommand("nms", "Rotated NMS over a detection CSV");
  nms_cmd->add_option("--in", in_path, "CSV with cx,cy,r1,r2,phi,score,category")->required();

  auto* demo_cmd = app.add_subcommand("heatmap-demo", "Encode, score and decode heatmap targets");
  demo_cmd->add_option("--in", in_path, "DOTA annotation file (synthetic boxes when omitted)");
  demo_cmd->add_option("--image-size", image_size, "Synthetic image side in pixels")
      ->check(CLI::Range(16L, 1L << 16));
  demo_cmd->add_option("--count", count, "Synthetic object count")->check(CLI::Range(0, 10000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*jiou_cmd) return cmd_jiou(config, pred_spec, target_spec);
    if (*sweep_cmd) return cmd_sweep(config, samples);
    if (*roundtrip_cmd) return cmd_roundtrip(config, in_path);
    if (*fit_cmd) return cmd_fit(config, init_spec, target_spec, loss_name, lr, max_iters, suite);
    if (*nms_cmd) return cmd_nms(config, in_path);
    if (*demo_cmd) return cmd_heatmap_demo(config, in_path, image_size, count);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const UnwritableError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnwritable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailures;
  }
  return kExitUsage;
}
