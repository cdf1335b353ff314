// striph: batch front-end for the strip solver, verification harness and
// weight analysis. Exit codes: 0 ok, 1 contract violation, 2 configuration
// error, 3 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "striph/striph.hpp"

namespace fs = std::filesystem;
using namespace striph;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitContract = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct GridSpec {
  int nx = 65;
  int ny = 65;
  double xi = 4.0;
};

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, 'x')) parts.push_back(tok);
  if (parts.size() != 3) throw BadArgument("grid must look like NXxNYxXI, got '" + s + "'");
  try {
    std::size_t used = 0;
    g.nx = std::stoi(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("nx");
    g.ny = std::stoi(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("ny");
    g.xi = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("xi");
  } catch (const std::logic_error&) {
    throw BadArgument("grid must look like NXxNYxXI, got '" + s + "'");
  }
  if (!(g.xi > 0.0)) throw BadArgument("grid xi must be positive");
  return g;
}

struct Common {
  std::string f = "xsinx";
  std::string weight = "one";
  double p = 2.0;
  int N = kDefaultModes;
  std::string lambda = "calibrated";
  std::string grid = "65x65x4";
  std::string out = ".";
  double coef_tol = kDefaultCoefficientTol;
};

void check_common(const Common& c) {
  if (!(c.p > 1.0) || !std::isfinite(c.p)) throw BadArgument("p must lie in (1, inf)");
  if (c.N < 1) throw BadArgument("N must be >= 1");
}

double resolve_lambda(const std::string& mode) {
  if (mode == "paper_half") return 0.5;
  if (mode == "calibrated") {
    const LambdaCalibration cal = calibrate_lambda(f_preset("xsinx"), make_uniform_grid2d(65, 65, 4.0, 1e-3), 16);
    std::fprintf(stderr, "lambda calibration on xsinx: residual %.3e at 1/2, %.3e at 1 -> lambda = %g\n",
                 cal.residual_half, cal.residual_one, cal.lambda);
    return cal.lambda;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(mode, &used);
    if (used != mode.size() || !std::isfinite(v)) throw std::invalid_argument(mode);
    return v;
  } catch (const std::logic_error&) {
    throw BadArgument("lambda must be paper_half, calibrated or a number, got '" + mode + "'");
  }
}

int run_solve(const Common& c) {
  check_common(c);
  const GridSpec gs = parse_grid(c.grid);
  const BoundaryDatum d = resolve_datum(c.f);
  const Weight w = resolve_weight(c.weight);
  const double lambda = resolve_lambda(c.lambda);
  const StripSolution sol = solve(d, c.N, lambda, c.coef_tol);
  const Grid2D grid = make_uniform_grid2d(gs.nx, gs.ny, gs.xi, 0.0);

  Json j = to_json(sol);
  j["weight"] = w.descriptor;
  j["p"] = c.p;
  j["tail_estimate"] = {{"y0", tail_estimate(sol, 0.0)}, {"y_grid_step", tail_estimate(sol, grid.y_grid.h)}};
  j["trace_error"] = trace_error_at(sol, d.f, 0.0, w, c.p);
  write_atomic(fs::path(c.out) / "solution.json", dump(j));
  write_atomic(fs::path(c.out) / "field.csv", field_csv(sol, grid));
  std::printf("solved %s: N = %d, lambda = %g, grid %s\n", d.name().c_str(), sol.N, sol.lambda, grid.describe().c_str());
  return kExitOk;
}

int run_verify(const Common& c, double xi, double weak_limit) {
  check_common(c);
  const GridSpec gs = parse_grid(c.grid);
  const BoundaryDatum d = resolve_datum(c.f);
  const Weight w = resolve_weight(c.weight);
  const double lambda = resolve_lambda(c.lambda);
  const StripSolution sol = solve(d, c.N, lambda, c.coef_tol);
  StrongCheckOptions opt;
  opt.grid = make_uniform_grid2d(gs.nx, gs.ny, gs.xi, 1e-3);
  const ResidualReport r = strong_solution_check(sol, w, c.p, xi > 0.0 ? xi : gs.xi, opt);
  write_atomic(fs::path(c.out) / "report.json", dump(to_json(r)));

  double weak_max = 0.0;
  for (double v : r.weak_residuals) weak_max = std::max(weak_max, v);
  bool ok = true;
  auto check = [&](bool pass, const char* what) {
    if (!pass) std::fprintf(stderr, "contract violated: %s\n", what);
    ok = ok && pass;
  };
  check(r.periodicity_max <= 1e-12, "periodicity");
  check(r.ux_at_0_max <= 1e-12, "u_x(0, y) = 0");
  check(weak_max <= weak_limit, "weak form");
  check(r.harmonic, "harmonicity");
  std::printf("verify %s: laplacian %.3e (fd %.3e, order %.3f), weak max %.3e, trace %.3e\n", d.name().c_str(),
              r.laplacian_max, r.fd_laplacian_max, r.laplacian_order, weak_max, r.trace_error);
  return ok ? kExitOk : kExitContract;
}

int run_weight(const Common& c, int resolution) {
  if (!(c.p > 1.0) || !std::isfinite(c.p)) throw BadArgument("p must lie in (1, inf)");
  if (resolution < 4) throw BadArgument("resolution must be >= 4");
  const Weight w = resolve_weight(c.weight);
  const WeightReport r = analyze_weight(w, c.p, resolution);
  write_atomic(fs::path(c.out) / "weight.json", dump(to_json(r)));
  std::printf("weight %s, p = %g: A_p constant %.6g (refined %.6g), in A_p: %s\n", r.descriptor.c_str(), r.p,
              r.ap_constant, r.refined_constant, r.in_ap ? "yes" : "no");
  return kExitOk;
}

int run_basis(int N, double tol, double limit, const std::string& out) {
  const DenseMatrix g = biortho_gram(N, tol);
  const double dev = g.max_deviation_from_identity();
  write_atomic(fs::path(out) / "gram.csv", gram_csv(g));
  write_atomic(fs::path(out) / "gram.json", dump(Json{{"N", N}, {"tol", tol}, {"max_deviation", dev}}));
  std::printf("Gram matrix N = %d: max deviation from identity %.3e\n", N, dev);
  if (!(dev <= limit)) {
    std::fprintf(stderr, "contract violated: deviation %.3e above %.3e\n", dev, limit);
    return kExitContract;
  }
  return kExitOk;
}

int run_yh(const std::vector<double>& ps, int N, const std::vector<std::string>& extra, const std::string& out) {
  if (N < 1) throw BadArgument("N must be >= 1");
  for (double p : ps)
    if (!(p > 1.0 && p <= 2.0)) throw BadArgument("Young-Hausdorff needs p in (1, 2]");
  std::vector<ScalarFunction1D> corpus = band_limited_corpus();
  for (const auto& s : extra) corpus.push_back(resolve_datum(s).f);
  std::string csv = "f,p,lhs,rhs_norm,ratio\n";
  bool ok = true;
  for (const auto& f : corpus)
    for (double p : ps) {
      const YoungHausdorffResult r = young_hausdorff_ratio(f.value, p, N);
      const bool finite = r.ratio && std::isfinite(*r.ratio);
      ok = ok && finite;
      csv += f.name + "," + format_double(p) + "," + format_double(r.lhs) + "," + format_double(r.rhs_norm) + "," +
             (r.ratio ? format_double(*r.ratio) : std::string("nan")) + "\n";
    }
  write_atomic(fs::path(out) / "yh.csv", csv);
  std::printf("Young-Hausdorff table: %zu functions x %zu exponents\n", corpus.size(), ps.size());
  return ok ? kExitOk : kExitContract;
}

int exit_code(const Error& e) {
  switch (e.error_class()) {
    case ErrorClass::config: return kExitConfig;
    case ErrorClass::numerical: return kExitNumerical;
    case ErrorClass::contract: return kExitContract;
  }
  return kExitConfig;
}

void add_common(CLI::App* cmd, Common& c, bool solver_flags) {
  cmd->add_option("--weight", c.weight, "weight: one | power:alpha=a | shifted:c=c | CSV path (x,nu)");
  cmd->add_option("--p", c.p, "exponent p > 1");
  cmd->add_option("--out", c.out, "output directory");
  if (!solver_flags) return;
  cmd->add_option("--f", c.f, "datum: xsinx | sinx | poly | CSV path (x,value)");
  cmd->add_option("--N", c.N, "number of modes");
  cmd->add_option("--lambda", c.lambda, "paper_half | calibrated | <value>");
  cmd->add_option("--grid", c.grid, "NXxNYxXI");
  cmd->add_option("--coef-tol", c.coef_tol, "coefficient quadrature tolerance");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-local Laplace problem on the half-strip: solve, verify, weights, basis, Young-Hausdorff"};
  app.require_subcommand(1);

  Common solve_c, verify_c, weight_c;
  auto* solve_cmd = app.add_subcommand("solve", "solve and export the spectrum and a sampled field");
  add_common(solve_cmd, solve_c, true);

  auto* verify_cmd = app.add_subcommand("verify", "solve and write the residual report");
  add_common(verify_cmd, verify_c, true);
  double verify_xi = 0.0, weak_limit = 1e-7;
  verify_cmd->add_option("--xi", verify_xi, "strip height for norms (default: grid xi)");
  verify_cmd->add_option("--weak-limit", weak_limit, "largest acceptable weak-form residual");

  auto* weight_cmd = app.add_subcommand("weight", "Muckenhoupt analysis of a weight");
  add_common(weight_cmd, weight_c, false);
  int resolution = 64;
  weight_cmd->add_option("--resolution", resolution, "cells per period for interval scans");

  auto* basis_cmd = app.add_subcommand("basis", "Gram matrix of the biorthonormal pair");
  int basis_N = 8;
  double basis_tol = 1e-10, basis_limit = 1e-8;
  std::string basis_out = ".";
  basis_cmd->add_option("--N", basis_N, "highest frequency");
  basis_cmd->add_option("--tol", basis_tol, "quadrature tolerance");
  basis_cmd->add_option("--max-deviation", basis_limit, "largest acceptable deviation from identity");
  basis_cmd->add_option("--out", basis_out, "output directory");

  auto* yh_cmd = app.add_subcommand("yh", "Young-Hausdorff ratios over a corpus and p-grid");
  std::vector<double> yh_p{1.25, 1.5, 2.0};
  int yh_N = 64;
  std::vector<std::string> yh_extra;
  std::string yh_out = ".";
  yh_cmd->add_option("--p", yh_p, "exponents in (1, 2]")->delimiter(',');
  yh_cmd->add_option("--N", yh_N, "highest frequency");
  yh_cmd->add_option("--f", yh_extra, "extra corpus entries (preset or CSV path)");
  yh_cmd->add_option("--out", yh_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*solve_cmd) return run_solve(solve_c);
    if (*verify_cmd) return run_verify(verify_c, verify_xi, weak_limit);
    if (*weight_cmd) return run_weight(weight_c, resolution);
    if (*basis_cmd) return run_basis(basis_N, basis_tol, basis_limit, basis_out);
    if (*yh_cmd) return run_yh(yh_p, yh_N, yh_extra, yh_out);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
