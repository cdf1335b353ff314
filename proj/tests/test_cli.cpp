#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "striph/io.hpp"

using namespace striph;
namespace fs = std::filesystem;

namespace {

fs::path work_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("striph_cli_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(STRIPH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

}  // namespace

TEST(Cli, SolveWritesSpectrumAndField) {
  const fs::path dir = work_dir("solve");
  ASSERT_EQ(run("solve --f xsinx --N 16 --lambda 1 --grid 9x5x2 --out " + dir.string()), 0);
  const Json j = Json::parse(read_file(dir / "solution.json"));
  EXPECT_EQ(j.at("N"), 16);
  EXPECT_EQ(j.at("lambda"), 1.0);
  EXPECT_NEAR(j.at("as")[0].get<double>(), 1.0, 1e-13);
  EXPECT_LT(j.at("trace_error").get<double>(), 1e-12);
  const auto cols = parse_csv(read_file(dir / "field.csv"), {"x", "y", "u", "ux", "uy", "uxx", "uyy"});
  EXPECT_EQ(cols[0].size(), 45u);
  EXPECT_EQ(cols[1][0], 0.0);
  fs::remove_all(dir);
}

TEST(Cli, CalibratedSolveTraceRowIsTheDatum) {
  const fs::path dir = work_dir("trace");
  ASSERT_EQ(run("solve --f xsinx --weight one --p 2 --N 16 --lambda calibrated --grid 65x65x4 --out " + dir.string()), 0);
  const auto cols = parse_csv(read_file(dir / "field.csv"), {"x", "y", "u", "ux", "uy", "uxx", "uyy"});
  ASSERT_EQ(cols[0].size(), 65u * 65u);
  for (std::size_t i = 0; i < 65; ++i) {
    EXPECT_EQ(cols[1][i], 0.0);
    EXPECT_NEAR(cols[2][i], cols[0][i] * std::sin(cols[0][i]), 1e-13);
  }
  fs::remove_all(dir);
}

TEST(Cli, CalibratedLambdaResolvesToOne) {
  const fs::path dir = work_dir("cal");
  ASSERT_EQ(run("solve --f sinx --N 8 --grid 5x5x1 --out " + dir.string()), 0);
  EXPECT_EQ(Json::parse(read_file(dir / "solution.json")).at("lambda"), 1.0);
  fs::remove_all(dir);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const fs::path a = work_dir("rep_a"), b = work_dir("rep_b");
  ASSERT_EQ(run("solve --f poly --N 32 --lambda 1 --grid 9x9x2 --out " + a.string()), 0);
  ASSERT_EQ(run("solve --f poly --N 32 --lambda 1 --grid 9x9x2 --out " + b.string()), 0);
  EXPECT_EQ(read_file(a / "solution.json"), read_file(b / "solution.json"));
  EXPECT_EQ(read_file(a / "field.csv"), read_file(b / "field.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, CsvDatum) {
  const fs::path dir = work_dir("csv");
  std::string csv = "x,value\n";
  for (int i = 0; i <= 400; ++i) {
    const double x = kTwoPi * i / 400.0;
    csv += format_double(x) + "," + format_double(x * std::sin(x)) + "\n";
  }
  write_atomic(dir / "datum.csv", csv);
  ASSERT_EQ(run("solve --f " + (dir / "datum.csv").string() + " --N 8 --lambda 1 --grid 5x5x1 --out " + dir.string()), 0);
  const Json j = Json::parse(read_file(dir / "solution.json"));
  EXPECT_NEAR(j.at("as")[0].get<double>(), 1.0, 1e-6);
  write_atomic(dir / "broken.csv", "x,value\n0,0\n2,1\n1,0\n");
  EXPECT_EQ(run("solve --f " + (dir / "broken.csv").string() + " --N 8 --lambda 1 --out " + dir.string()), 2);
  fs::remove_all(dir);
}

TEST(Cli, ConfigurationErrors) {
  const fs::path dir = work_dir("cfg");
  EXPECT_EQ(run("solve --f xsinx --grid 9by9 --out " + dir.string()), 2);
  EXPECT_EQ(run("solve --f cosx --lambda 1 --out " + dir.string()), 2);
  EXPECT_EQ(run("solve --f xsinx --lambda sometimes --out " + dir.string()), 2);
  EXPECT_EQ(run("solve --f xsinx --N 0 --lambda 1 --out " + dir.string()), 2);
  EXPECT_EQ(run("solve --unknown-flag"), 2);
  EXPECT_EQ(run(""), 2);
  fs::remove_all(dir);
}

TEST(Cli, VerifyPassesAndHalfLambdaViolatesContract) {
  const fs::path dir = work_dir("verify");
  EXPECT_EQ(run("verify --f xsinx --N 16 --lambda 1 --grid 17x17x2 --out " + dir.string()), 0);
  const Json j = Json::parse(read_file(dir / "report.json"));
  EXPECT_TRUE(j.at("harmonic").get<bool>());
  EXPECT_EQ(j.at("provenance").at("f"), "xsinx");
  EXPECT_EQ(run("verify --f xsinx --N 16 --lambda paper_half --grid 17x17x2 --out " + dir.string()), 1);
  fs::remove_all(dir);
}

TEST(Cli, Weight) {
  const fs::path dir = work_dir("weight");
  EXPECT_EQ(run("weight --weight power:alpha=0.5 --p 2 --resolution 16 --out " + dir.string()), 0);
  const Json j = Json::parse(read_file(dir / "weight.json"));
  EXPECT_TRUE(j.at("in_ap").get<bool>());
  EXPECT_EQ(run("weight --weight power:alpha=-2 --p 2 --resolution 16 --out " + dir.string()), 3);
  EXPECT_EQ(run("weight --weight gauss --out " + dir.string()), 2);
  fs::remove_all(dir);
}

TEST(Cli, Basis) {
  const fs::path dir = work_dir("basis");
  EXPECT_EQ(run("basis --N 8 --out " + dir.string()), 0);
  const Json j = Json::parse(read_file(dir / "gram.json"));
  EXPECT_LE(j.at("max_deviation").get<double>(), 1e-10);
  EXPECT_TRUE(fs::exists(dir / "gram.csv"));
  fs::remove_all(dir);
}

TEST(Cli, YoungHausdorff) {
  const fs::path dir = work_dir("yh");
  EXPECT_EQ(run("yh --p 1.5,2 --N 16 --f xsinx --out " + dir.string()), 0);
  const auto text = read_file(dir / "yh.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "f,p,lhs,rhs_norm,ratio");
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  EXPECT_EQ(lines, 1u + 6u * 2u);
  EXPECT_EQ(run("yh --p 3 --out " + dir.string()), 2);
  fs::remove_all(dir);
}
