#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "striph/io.hpp"
#include "striph/verification.hpp"

using namespace striph;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("striph_io_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string sampled_csv(int count, double (*f)(double)) {
  std::string out = "x,value\n";
  for (int i = 0; i < count; ++i) {
    const double x = kTwoPi * i / (count - 1);
    out += format_double(x) + "," + format_double(f(x)) + "\n";
  }
  return out;
}

double xsinx(double x) { return x * std::sin(x); }

}  // namespace

TEST(Presets, KnownAndUnknown) {
  for (const auto& name : f_preset_names()) {
    const BoundaryDatum d = f_preset(name);
    EXPECT_EQ(d.name(), name);
    EXPECT_TRUE(d.h_is_zero());
    EXPECT_NO_THROW(d.check_boundary());
    const double h = 1e-6;
    EXPECT_NEAR(d.f.d1(2.0), (d.f(2.0 + h) - d.f(2.0 - h)) / (2.0 * h), 1e-7) << name;
    EXPECT_NEAR(d.f.d2(2.0), (d.f.d1(2.0 + h) - d.f.d1(2.0 - h)) / (2.0 * h), 1e-7) << name;
  }
  EXPECT_THROW(f_preset("cosx"), UnknownPreset);
  EXPECT_THROW(weight_from_preset("power:alpha=x"), UnknownPreset);
  EXPECT_THROW(weight_from_preset("gauss"), UnknownPreset);
}

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1e-20), "9.9999999999999995e-21");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(kPi)), kPi);
}

TEST(Csv, ParsesWithWhitespaceAndBlankLines) {
  const auto cols = parse_csv("x, value\n\n0, 1\n 1.5 ,2e-3\n", {"x", "value"});
  ASSERT_EQ(cols.size(), 2u);
  EXPECT_EQ(cols[0], (std::vector<double>{0.0, 1.5}));
  EXPECT_EQ(cols[1], (std::vector<double>{1.0, 2e-3}));
}

TEST(Csv, Errors) {
  EXPECT_THROW(parse_csv("", {"x", "value"}), MalformedCSV);
  EXPECT_THROW(parse_csv("x,value\n", {"x", "value"}), MalformedCSV);
  EXPECT_THROW(parse_csv("x,nu\n0,1\n", {"x", "value"}), MalformedCSV);
  EXPECT_THROW(parse_csv("x,value\n0,1,2\n", {"x", "value"}), MalformedCSV);
  EXPECT_THROW(parse_csv("x,value\n0,abc\n", {"x", "value"}), MalformedCSV);
  EXPECT_THROW(parse_csv("x,value\n0,nan\n", {"x", "value"}), MalformedCSV);
  EXPECT_THROW(sampled_function({0.0, 2.0, 1.0}, {0.0, 1.0, 2.0}, "bad"), NonMonotoneAbscissae);
  EXPECT_THROW(sampled_function({0.0}, {0.0}, "short"), MalformedCSV);
  EXPECT_THROW(sampled_function({0.0, 7.0}, {0.0, 0.0}, "wide"), MalformedCSV);
}

TEST(Spline, ReproducesSmoothDatum) {
  const auto cols = parse_csv(sampled_csv(801, xsinx), {"x", "value"});
  const ScalarFunction1D f = sampled_function(cols[0], cols[1], "xsinx.csv");
  for (int i = 0; i <= 997; ++i) {
    const double x = kTwoPi * i / 997.0;
    EXPECT_NEAR(f(x), xsinx(x), 1e-9) << x;
  }
  EXPECT_NEAR(f.d1(0.0), 0.0, 1e-8);
  EXPECT_NEAR(f.d1(kTwoPi), kTwoPi, 1e-8);
  EXPECT_NEAR(f.d1(1.0), std::sin(1.0) + std::cos(1.0), 1e-6);
}

TEST(Spline, ReproducesCubic) {
  // oracle: a clamped spline with exact end slopes reproduces cubics; the
  // 5-point end slopes are exact for quartics
  auto p = [](double x) { return x * (kTwoPi - x) * (kPi - x); };
  std::vector<double> xs, ys;
  for (int i = 0; i <= 20; ++i) {
    const double x = kTwoPi * i / 20.0;
    xs.push_back(x);
    ys.push_back(p(x));
  }
  const ScalarFunction1D f = sampled_function(xs, ys, "cubic");
  for (double x : {0.1, 1.0, 3.3, 6.2}) EXPECT_NEAR(f(x), p(x), 1e-11);
}

TEST(Files, AtomicWriteAndRead) {
  const fs::path dir = scratch_dir("atomic");
  const fs::path out = dir / "nested" / "a.txt";
  write_atomic(out, "first");
  write_atomic(out, "second\n");
  EXPECT_EQ(read_file(out), "second\n");
  EXPECT_FALSE(fs::exists(fs::path(out.string() + ".tmp")));
  EXPECT_THROW(read_file(dir / "missing.txt"), BadArgument);
  fs::remove_all(dir);
}

TEST(Files, SampledDatumAndWeight) {
  const fs::path dir = scratch_dir("load");
  write_atomic(dir / "f.csv", sampled_csv(401, xsinx));
  write_atomic(dir / "w.csv", "x,nu\n0,1\n3.14159,3\n6,1\n");
  const BoundaryDatum d = resolve_datum((dir / "f.csv").string());
  EXPECT_EQ(d.name(), "f.csv");
  EXPECT_NO_THROW(d.check_boundary());
  const Weight w = resolve_weight((dir / "w.csv").string());
  EXPECT_EQ(w(0.0), 1.0);
  EXPECT_NEAR(w(kPi), 3.0, 1e-4);
  EXPECT_EQ(resolve_weight("one")(2.0), 1.0);
  write_atomic(dir / "bad.csv", "x,value\n0,0\n1,zz\n");
  EXPECT_THROW(resolve_datum((dir / "bad.csv").string()), MalformedCSV);
  EXPECT_TRUE(looks_like_path("data/f.csv"));
  EXPECT_FALSE(looks_like_path("xsinx"));
  fs::remove_all(dir);
}

TEST(Json, SolutionRoundTrip) {
  const StripSolution sol = solve(f_preset("poly"), 32, 1.0);
  const StripSolution back = solution_from_json(Json::parse(dump(to_json(sol))));
  EXPECT_EQ(back.N, 32);
  EXPECT_EQ(back.lambda, 1.0);
  EXPECT_EQ(back.f_ref, "poly");
  EXPECT_EQ(back.spectrum.a0c, sol.spectrum.a0c);
  EXPECT_EQ(back.spectrum.ac, sol.spectrum.ac);
  EXPECT_EQ(back.spectrum.as, sol.spectrum.as);
  EXPECT_FALSE(back.datum.has_value());
  for (double x : {0.0, 1.0, 5.0})
    for (double y : {0.0, 0.3}) EXPECT_EQ(eval_u(back, x, y), eval_u(sol, x, y));
}

TEST(Json, MalformedSolution) {
  EXPECT_THROW(solution_from_json(Json{{"N", 2}}), BadArgument);
  EXPECT_THROW(solution_from_json(Json{{"N", 2}, {"a0c", 0.0}, {"ac", {1.0}}, {"as", {1.0, 2.0}}, {"lambda", 1.0}}),
               BadArgument);
  const fs::path dir = scratch_dir("json");
  write_atomic(dir / "s.json", "{ not json");
  EXPECT_THROW(load_solution_json(dir / "s.json"), BadArgument);
  fs::remove_all(dir);
}

TEST(Json, ReportIsDeterministic) {
  const StripSolution sol = solve(f_preset("xsinx"), 8, 1.0);
  const std::string a = dump(to_json(strong_solution_check(sol, weight_one(), 2.0, 2.0)));
  const std::string b = dump(to_json(strong_solution_check(sol, weight_one(), 2.0, 2.0)));
  EXPECT_EQ(a, b);
  const Json j = Json::parse(a);
  EXPECT_EQ(j.at("provenance").at("f"), "xsinx");
  EXPECT_EQ(j.at("weak_residuals").size(), 16u);
  EXPECT_TRUE(j.at("harmonic").get<bool>());
}

TEST(Json, WeightReport) {
  const Json j = to_json(analyze_weight(weight_one(), 2.0, 16));
  EXPECT_EQ(j.at("weight"), "one");
  EXPECT_NEAR(j.at("ap_constant").get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(j.at("in_ap").get<bool>());
}

TEST(Export, FieldCsv) {
  const StripSolution sol = solve(f_preset("xsinx"), 4, 1.0);
  const std::string csv = field_csv(sol, make_uniform_grid2d(5, 3, 2.0, 0.0));
  const auto cols = parse_csv(csv, {"x", "y", "u", "ux", "uy", "uxx", "uyy"});
  ASSERT_EQ(cols[0].size(), 15u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(cols[1][i], 0.0);
    EXPECT_NEAR(cols[2][i], xsinx(cols[0][i]), 1e-14);
  }
  EXPECT_EQ(csv, field_csv(sol, make_uniform_grid2d(5, 3, 2.0, 0.0)));
}

TEST(Export, GramCsv) {
  const std::string csv = gram_csv(biortho_gram(1));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "row,C0,C1,S1");
}
