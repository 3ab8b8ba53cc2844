// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tmig/cli/commands.hpp"
#include "tmig/cli/experiment.hpp"

namespace tmig::cli {
namespace {

namespace fs = std::filesystem;

const std::string kData = TMIG_TEST_DATA;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("tmig_cli_test_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  [[nodiscard]] const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

TEST(Config, ParseBytes) {
  EXPECT_EQ(parse_bytes("4096"), 4096);
  EXPECT_EQ(parse_bytes("1MB"), 1'000'000);
  EXPECT_EQ(parse_bytes("1.5 KiB"), 1536);
  EXPECT_EQ(parse_bytes("2GiB"), 2LL << 30);
  EXPECT_THROW((void)parse_bytes("1.0001B"), Error);
  EXPECT_THROW((void)parse_bytes("lots"), Error);
}

TEST(Config, RoundTrip) {
  auto c = load_config(kData + "/tiny.config");
  EXPECT_EQ(c.device.gpu_mem_bytes, 102400);
  EXPECT_EQ(c.device.host_mem_bytes, 1'000'000);
  EXPECT_EQ(c.policy, std::vector<PolicyKind>{PolicyKind::G10});
  set_config_value(c, "sweep.ssd_bw", "1.6,3.2");
  set_config_value(c, "policy", "g10,base-uvm");
  set_config_value(c, "noise_pct", "0.1");
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Config, Rejections) {
  ExperimentConfig c;
  EXPECT_THROW(set_config_value(c, "gpu_memory", "1"), Error);
  EXPECT_THROW(set_config_value(c, "policy", "magic"), Error);
  EXPECT_THROW(set_config_value(c, "sweep.gpu_mem_bytes", "1,2"), Error);
  EXPECT_THROW(set_config_value(c, "num_iterations", "two"), Error);
  EXPECT_THROW((void)parse_config("gpu_mem_bytes 5\n"), Error);
  EXPECT_TRUE(is_sweep_key("ssd_bw"));
  EXPECT_FALSE(is_sweep_key("gpu_mem_bytes"));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({"plan", "/nonexistent/trace.json", "--out", "-"}).code, kExitIo);
  EXPECT_EQ(cli({"plan", kData + "/tiny.json", "--config", "/nonexistent.cfg", "--out", "-"}).code,
            kExitIo);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitInput);
  EXPECT_EQ(cli({"plan"}).code, kExitInput);
  EXPECT_EQ(cli({"gen", "--layers", "0", "--out", "-"}).code, kExitInput);
  EXPECT_EQ(cli({"simulate", kData + "/tiny.json", "--policy", "nope", "--out", "-"}).code,
            kExitInput);
  const auto r = cli({"sweep", kData + "/tiny.json", "--out", "-"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, PlanMatchesGolden) {
  const auto r = cli({"plan", kData + "/tiny.json", "--config", kData + "/tiny.config", "--out", "-"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "# plan.json\n" + slurp(kData + "/tiny_plan.json") + "# program.g10\n" +
                       slurp(kData + "/tiny_program.g10"));
}

TEST(Cli, AnalyzeWritesCsvs) {
  TempDir dir("analyze");
  const auto r = cli({"analyze", kData + "/tiny.json", "--out", dir.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto avt = slurp(dir.path() / "active_vs_total.csv");
  EXPECT_EQ(avt.substr(0, avt.find('\n')), "kernel_index,name,active_bytes,total_bytes");
  EXPECT_EQ(avt, "kernel_index,name,active_bytes,total_bytes\n0,K0,61440,61440\n"
                 "1,K1,81920,143360\n2,K2,81920,143360\n3,K3,92160,92160\n");
  EXPECT_TRUE(fs::exists(dir.path() / "period_cdf.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "period_scatter.csv"));
}

TEST(Cli, SimulateSeveralPolicies) {
  TempDir dir("simulate");
  const auto r = cli({"simulate", kData + "/tiny.json", "--config", kData + "/tiny.config", "--policy",
                      "g10,base-uvm,ideal", "--out", dir.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto summary = slurp(dir.path() / "summary.csv");
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 4);
  EXPECT_TRUE(fs::exists(dir.path() / "kernels_g10.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "kernels_base-uvm.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "result.json"));
  const auto kernels = slurp(dir.path() / "kernels.csv");
  EXPECT_EQ(std::count(kernels.begin(), kernels.end(), '\n'), 1 + 4 * 3);
}

TEST(Cli, SweepRowCount) {
  TempDir dir("sweep");
  {
    std::ofstream cfg(dir.path() / "sweep.cfg");
    cfg << "gpu_mem_bytes = 100KiB\npolicy = g10,base-uvm\nworkers = 2\n"
        << "sweep.ssd_bw = 1.6,3.2,4.8,6.4\nsweep.host_mem_bytes = 0,1MB\n";
  }
  const auto r = cli({"sweep", kData + "/tiny.json", "--config", (dir.path() / "sweep.cfg").string(),
                      "--out", "-"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  // Header plus 4 x 2 grid points for each of the two policies.
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 1 + 16);
  EXPECT_NE(r.out.find("ssd_bw,host_mem_bytes,policy,total_us"), std::string::npos);
  // Parallel workers do not change the output.
  const auto serial = cli({"sweep", kData + "/tiny.json", "--config",
                           (dir.path() / "sweep.cfg").string(), "--workers", "1", "--out", "-"});
  EXPECT_EQ(serial.out, r.out);
}

TEST(Cli, OracleRatioAtLeastOne) {
  const auto r = cli({"oracle", kData + "/tiny.json", "--config", kData + "/tiny.config", "--out", "-"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto line_start = r.out.find("\ntiny,") + 1;
  ASSERT_NE(line_start, 0u);
  const auto line = r.out.substr(line_start, r.out.find('\n', line_start) - line_start);
  const double ratio = std::stod(line.substr(line.rfind(',') + 1));
  EXPECT_GE(ratio, 1.0);
}

TEST(Cli, GenIsDeterministic) {
  const auto a = cli({"gen", "--layers", "3", "--seed", "7", "--out", "-"});
  const auto b = cli({"gen", "--layers", "3", "--seed", "7", "--out", "-"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("# trace.json\n", 0), 0u);
}

}  // namespace
}  // namespace tmig::cli
