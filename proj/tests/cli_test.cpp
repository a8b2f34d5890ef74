// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

// Drives the jiou_cli binary and checks its reports against the library.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "jiou/csv.hpp"
#include "jiou/jiou_loss.hpp"
#include "jiou/obb.hpp"
#include "jiou/random.hpp"

namespace jiou {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string command = std::string(JIOU_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  char buffer[4096];
  std::size_t got = 0;
  while ((got = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) result.out.append(buffer, got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("jiou_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::string dota_line(const CornerQuadd& quad, const std::string& category) {
  std::ostringstream line;
  line << std::setprecision(17);
  for (int i = 0; i < 4; ++i) line << quad.corners(0, i) << ' ' << quad.corners(1, i) << ' ';
  line << category << " 0";
  return line.str();
}

TEST_F(CliTest, JiouOfIdenticalBoxes) {
  const auto r = run("jiou --pred 10,20,4,2,0.3 --target 10,20,4,2,0.3");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("ratio=1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("loss=0\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, JiouOfConcentricCircles) {
  const auto r = run("jiou --pred 0,0,1,1,0 --target 0,0,2,2,0");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("ratio=0.25\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("loss=" + format_real(std::log(4.0)) + "\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, JiouMatchesLibrary) {
  const OrientedBoxd pred{1, 2, 5, 1.5, 0.4};
  const OrientedBoxd target{0, 0, 4, 2, -0.9};
  const auto v = jiou_loss(pred, target, 256);
  const auto g = jiou_gradient(pred, target, 256);
  const std::string expected = "n=256\nratio=" + format_real(v.ratio) + "\nloss=" +
                               format_real(v.loss) + "\nd_phi=" + format_real(g.d_phi) +
                               "\nd_r1=" + format_real(g.d_r1) + "\nd_r2=" + format_real(g.d_r2) +
                               "\n";
  const auto r = run("--n 256 jiou --pred 1,2,5,1.5,0.4 --target 0,0,4,2,-0.9");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, expected);
  // Degrees on the command line give the same result.
  const auto deg = run("--n 256 --degrees jiou --pred 1,2,5,1.5,45 --target 0,0,4,2,45");
  const auto rad = run("--n 256 jiou --pred 1,2,5,1.5,0.78539816339744828 --target 0,0,4,2,"
                       "0.78539816339744828");
  EXPECT_EQ(deg.out, rad.out);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run("jiou --pred 1,2,3 --target 0,0,1,1,0").exit_code, 2);
  EXPECT_EQ(run("jiou --pred 1,2,3,x,0 --target 0,0,1,1,0").exit_code, 2);
  EXPECT_EQ(run("jiou --pred 0,0,-1,1,0 --target 0,0,1,1,0").exit_code, 2);
  EXPECT_EQ(run("--n 2 jiou --pred 0,0,1,1,0 --target 0,0,1,1,0").exit_code, 2);
  EXPECT_EQ(run("no-such-command").exit_code, 2);
  EXPECT_EQ(run("").exit_code, 2);
  EXPECT_EQ(run("fit --init 0,0,1,1,0").exit_code, 2);
  EXPECT_EQ(run("fit --init 0,0,2,1,0 --target 0,0,2,1,0 --loss l2").exit_code, 2);
}

TEST_F(CliTest, UnwritableOutput) {
  const std::string target = path("missing_dir/out.csv");
  EXPECT_EQ(run("--out " + target + " sweep --samples 10000").exit_code, 3);
  EXPECT_EQ(run("--out " + target + " jiou --pred 0,0,1,1,0 --target 0,0,2,2,0").exit_code, 3);
}

TEST_F(CliTest, RoundtripOfExactRectangles) {
  std::mt19937_64 gen(113);
  std::ofstream file(path("exact.txt"));
  file << "imagesource:synthetic\ngsd:0.5\n";
  for (int k = 0; k < 40; ++k) {
    const auto box = canonicalize(OrientedBoxd{uniform(gen, 20, 900), uniform(gen, 20, 900),
                                               uniform(gen, 2, 60), uniform(gen, 2, 60),
                                               uniform(gen, -3, 3)});
    file << dota_line(decode_corners(box), "plane") << '\n';
  }
  file.close();
  const auto r = run("roundtrip " + path("exact.txt"));
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("records=40\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("failures=0\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("parse_errors=0\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, RoundtripCountsJitteredQuads) {
  std::mt19937_64 gen(127);
  std::ofstream file(path("jitter.txt"));
  int jittered = 0;
  for (int k = 0; k < 30; ++k) {
    const auto box = canonicalize(OrientedBoxd{uniform(gen, 20, 500), uniform(gen, 20, 500),
                                               uniform(gen, 5, 40), uniform(gen, 5, 40),
                                               uniform(gen, -3, 3)});
    auto quad = decode_corners(box);
    if (k % 3 == 0) {
      quad.corners(0, 1) += 0.5;
      ++jittered;
    }
    file << dota_line(quad, "ship") << '\n';
  }
  file.close();
  const auto r = run("roundtrip " + path("jitter.txt"));
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("failures=" + std::to_string(jittered) + "\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("failure_line=1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("failure_line=4\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, RoundtripReportsMalformedLines) {
  std::ofstream file(path("bad.txt"));
  file << dota_line(decode_corners(OrientedBoxd{50, 50, 10, 5, 0.2}), "car") << '\n';
  file << "1 2 3 4 5 6 7 8 car\n";
  file << "1 2 3 4 5 6 7 eight car 0\n";
  file.close();
  const auto r = run("roundtrip " + path("bad.txt"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("records=1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("parse_errors=2\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("parse_error_line=2\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("parse_error_line=3\n"), std::string::npos) << r.out;
  EXPECT_EQ(run("roundtrip " + path("nonexistent.txt")).exit_code, 2);
}

TEST_F(CliTest, FitFromTargetIsOneRow) {
  const auto r = run("fit --init 0,0,4,2,0.3 --target 0,0,4,2,0.3");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, "step,phi,r1,r2,loss,exact_iou\n0,0.3,4,2,0,1\n");
}

TEST_F(CliTest, FitTraceEndsConverged) {
  const auto r = run("--out " + path("trace.csv") +
                     " fit --init 0,0,3,1,0.9 --target 0,0,4,1.5,-0.3 --max-iters 300");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.substr(0, 12), "converged=1 ");
  const std::string csv = read_file(path("trace.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,phi,r1,r2,loss,exact_iou");
}

TEST_F(CliTest, Nms) {
  std::ofstream file(path("dets.csv"));
  file << "cx,cy,r1,r2,phi,score,category\n"
          "2,0.5,1,0.5,0,0.8,0\n"
          "3,0.5,1,0.5,0,0.7,0\n"
          "1,0.5,1,0.5,0,0.9,0\n"
          "1,0.5,1,0.5,0,0.6,1\n";
  file.close();
  const auto r = run("--nms-iou 0.3 nms --in " + path("dets.csv"));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out,
            "cx,cy,r1,r2,phi,score,category\n"
            "1,0.5,1,0.5,0,0.9,0\n"
            "3,0.5,1,0.5,0,0.7,0\n"
            "1,0.5,1,0.5,0,0.6,1\n");
  std::ofstream bad(path("bad.csv"));
  bad << "1,2,3\n";
  bad.close();
  EXPECT_EQ(run("nms --in " + path("bad.csv")).exit_code, 2);
}

TEST_F(CliTest, HeatmapDemoRecoversAllObjects) {
  const auto r = run("--out " + path("dets.csv") + " heatmap-demo --count 6");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("objects=6 "), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("detections=6\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find(" mu=5 "), std::string::npos) << r.out;
}

TEST_F(CliTest, OutputsAreDeterministic) {
  const std::vector<std::string> commands = {
      "jiou --pred 1,2,5,1.5,0.4 --target 0,0,4,2,-0.9",
      "sweep --samples 10000",
      "fit --suite 5",
      "heatmap-demo --count 12",
  };
  for (std::size_t k = 0; k < commands.size(); ++k) {
    const std::string a = path("a" + std::to_string(k));
    const std::string b = path("b" + std::to_string(k));
    ASSERT_EQ(run("--out " + a + " " + commands[k]).exit_code, 0) << commands[k];
    ASSERT_EQ(run("--out " + b + " " + commands[k]).exit_code, 0) << commands[k];
    EXPECT_EQ(read_file(a), read_file(b)) << commands[k];
    EXPECT_FALSE(read_file(a).empty()) << commands[k];
  }
}

}  // namespace
}  // namespace jiou
