// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "striph/striph.hpp"

using namespace striph;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

// C1
Outcome gram_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  const double dev = biortho_gram(32, 1e-10).max_deviation_from_identity();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {dev <= 1e-8 && secs < 10.0, "N=32 max deviation " + fmt("%.3e", dev) + ", " + fmt("%.2f", secs) + " s"};
}

// C2
Outcome basis_convergence() {
  const std::vector<int> Ns{8, 16, 32, 64, 128, 256};
  bool ok = true;
  std::string detail;
  for (const char* name : {"sinx", "poly"}) {
    const BoundaryDatum d = f_preset(name);
    const BiorthoSpectrum s = biortho_coefficients(d.f.value, Ns.back());
    for (const char* wname : {"one", "power:alpha=0.5"}) {
      const Weight w = weight_from_preset(wname);
      for (double p : {1.5, 2.0, 3.0}) {
        std::vector<double> errs;
        for (int N : Ns) {
          const PartialSum ps = partial_sum(s, N, N);
          const QuadratureOptions opts{.max_depth = 40, .initial_panels = panels_for_frequency(N)};
          errs.push_back(weighted_lp_norm_J([&](double x) { return ps(x) - d.f(x); }, w, p, kDefaultNormTol, opts));
        }
        const bool mono = non_increasing(errs);
        const bool small = errs.back() <= 1e-3;
        if (!mono || !small) {
          ok = false;
          detail += std::string(" [") + name + "," + wname + ",p=" + fmt("%g", p) + ": N=256 error " +
                    fmt("%.3e", errs.back()) + (mono ? "" : ", not monotone") + "]";
        }
      }
    }
  }
  return {ok, ok ? "all 12 series monotone and <= 1e-3 at N=256" : "violations:" + detail};
}

// C3
Outcome lambda_calibration() {
  const Grid2D g = make_uniform_grid2d(65, 65, 4.0, 1e-3);
  const BoundaryDatum d = f_preset("xsinx");
  const StripSolution one = solve(d, kDefaultModes, 1.0);
  const StripSolution half = solve(d, kDefaultModes, 0.5);
  const double r_one = laplacian_residual(one, g, LaplacianMode::analytic).max_res;
  const double r_half = laplacian_residual(half, g, LaplacianMode::analytic).max_res;
  const LaplacianResidual fd = laplacian_residual(one, g, LaplacianMode::finite_difference);
  const LambdaCalibration cal = calibrate_lambda(d, g);
  const bool ok = r_one <= 1e-12 && r_half >= 0.3 && fd.order >= 1.9 && cal.lambda == 1.0;
  return {ok, "grid " + g.describe() + ": analytic residual " + fmt("%.3e", r_one) + " (lambda=1), " +
                  fmt("%.3e", r_half) + " (lambda=1/2); FD order " + fmt("%.3f", fd.order) + "; calibrated lambda " +
                  fmt("%g", cal.lambda)};
}

// C4
Outcome boundary_structure() {
  std::vector<double> ys = trace_ladder();
  for (double y : {0.0, 2.0, 4.0, 8.0}) ys.push_back(y);
  double per = 0.0, ux0 = 0.0;
  int fields = 0;
  for (const auto& name : f_preset_names())
    for (int N : {16, 64, 128})
      for (double lam : {1.0, 0.5}) {
        const StripSolution sol = solve(f_preset(name), N, lam);
        for (double y : ys) {
          per = std::max(per, std::fabs(eval_u(sol, 0.0, y) - eval_u(sol, kTwoPi, y)));
          ux0 = std::max(ux0, std::fabs(eval_ux(sol, 0.0, y)));
        }
        ++fields;
      }
  return {per <= 1e-12 && ux0 <= 1e-12, std::to_string(fields) + " fields: periodicity_max " + fmt("%.3e", per) +
                                            ", ux_at_0_max " + fmt("%.3e", ux0)};
}

// C5
Outcome trace() {
  const StripSolution xs = solve(f_preset("xsinx"), kDefaultModes, 1.0);
  const double e_exact = trace_error_at(xs, *xs.datum, 0.0, weight_one(), 2.0);
  bool ok = e_exact <= 1e-12;
  std::string detail = "xsinx trace error " + fmt("%.3e", e_exact);
  for (const char* wname : {"one", "power:alpha=0.5"}) {
    const Weight w = weight_from_preset(wname);
    std::vector<double> errs;
    for (int N : {8, 16, 32, 64, 128}) {
      const StripSolution s = solve(f_preset("sinx"), N, 1.0);
      errs.push_back(trace_error_at(s, *s.datum, 0.0, w, 2.0));
    }
    ok = ok && errs[3] <= 1e-3 && strictly_decreasing(errs);
    detail += std::string("; sinx N=64 (") + wname + ") " + fmt("%.3e", errs[3]) +
              (strictly_decreasing(errs) ? ", decreasing" : ", NOT decreasing");
  }
  return {ok, detail};
}

// C6
Outcome weak_form() {
  const double lam = calibrate_lambda(f_preset("xsinx"), make_uniform_grid2d(65, 65, 4.0, 1e-3)).lambda;
  double worst = 0.0;
  std::string detail = "lambda " + fmt("%g", lam);
  for (const auto& name : f_preset_names()) {
    const StripSolution sol = solve(f_preset(name), kDefaultModes, lam);
    double m = 0.0;
    for (double r : weak_form_residual(as_field(sol), std::nullopt, standard_test_battery())) m = std::max(m, r);
    worst = std::max(worst, m);
    detail += ", " + name + " " + fmt("%.3e", m);
  }
  return {worst <= 1e-7, detail};
}

// C7
Outcome uniqueness() {
  const auto names = f_preset_names();
  double worst = 0.0;
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j)
      worst = std::max(worst, superposition_check(f_preset(names[i]), f_preset(names[j]), 0.7, -1.3, default_probes()));
  BoundaryDatum zero;
  zero.f.value = [](double) { return 0.0; };
  zero.f.name = "zero";
  const StripSolution z = solve(zero, kDefaultModes, 1.0);
  double zmax = 0.0;
  for (const auto& [x, y] : default_probes()) zmax = std::max(zmax, std::fabs(eval_u(z, x, y)));
  for (int i = 0; i <= 32; ++i)
    for (double y : {0.0, 1e-3, 0.5}) zmax = std::max(zmax, std::fabs(eval_u(z, kTwoPi * i / 32.0, y)));
  return {worst <= 1e-10 && zmax <= 1e-14,
          "superposition max " + fmt("%.3e", worst) + ", zero datum max |u| " + fmt("%.3e", zmax)};
}

// C8
Outcome norm_estimate() {
  const auto corpus = norm_corpus();
  double sup = 0.0, drift = 0.0, n_change = 0.0;
  bool finite = true;
  for (const auto& f : corpus) {
    const BoundaryDatum d{f, std::nullopt};
    const auto a = norm_estimate_ladder(solve(d, 64, 1.0), d, weight_one(), 2.0);
    const auto b = norm_estimate_ladder(solve(d, 128, 1.0), d, weight_one(), 2.0);
    if (!a || !b || !std::isfinite(a->sup) || !std::isfinite(b->sup)) {
      finite = false;
      continue;
    }
    sup = std::max(sup, b->sup);
    drift = std::max({drift, a->xi_drift, b->xi_drift});
    n_change = std::max(n_change, std::fabs(b->sup - a->sup) / b->sup);
  }
  return {finite && drift <= 0.01 && n_change <= 0.05,
          std::to_string(corpus.size()) + " functions (nu=one, p=2): sup ratio " + fmt("%.6f", sup) +
              " (baseline), xi drift " + fmt("%.2e", drift) + ", N 64->128 change " + fmt("%.2e", n_change)};
}

// C9
Outcome muckenhoupt() {
  const WeightReport one = muckenhoupt_constant(weight_one(), 2.0, 64);
  const WeightReport half = muckenhoupt_constant(weight_power(0.5), 2.0, 64);
  bool rejected = false;
  try {
    muckenhoupt_constant(weight_power(-2.0), 2.0, 64);
  } catch (const NotIntegrable&) {
    rejected = true;
  }
  const ReverseHolderResult rh = reverse_holder_probe(weight_one(), 2.0, 64);
  const double half_shift = std::fabs(half.refined_constant - half.ap_constant) / half.ap_constant;
  const bool ok = std::fabs(one.ap_constant - 1.0) <= 1e-12 && half.in_ap && half_shift <= 0.1 && rejected &&
                  rh.found && rh.delta == 1.0 && std::fabs(rh.constant - 1.0) <= 1e-12;
  return {ok, "[one]_2 = " + fmt("%.15f", one.ap_constant) + "; [power 0.5]_2 = " + fmt("%.6f", half.ap_constant) +
                  " (refined " + fmt("%.6f", half.refined_constant) + ")" + "; power -2 " +
                  (rejected ? "rejected" : "NOT rejected") + "; RH delta " + fmt("%g", rh.delta) + ", C " +
                  fmt("%.15f", rh.constant)};
}

// C10
Outcome young_hausdorff() {
  double worst = 0.0;
  bool finite = true;
  for (const auto& f : band_limited_corpus()) {
    const double norm = weighted_lp_norm_J(f.value, weight_one(), 2.0, 1e-13);
    worst = std::max(worst, std::fabs(parseval_sum(fourier_coefficients(f.value, 8)) - norm * norm));
    for (double p : {1.25, 1.5}) {
      const auto r = young_hausdorff_ratio(f.value, p, 16);
      finite = finite && r.ratio && std::isfinite(*r.ratio);
    }
  }
  return {worst <= 1e-8 && finite,
          "Parseval max deviation " + fmt("%.3e", worst) + "; ratios at p=1.25,1.5 " + (finite ? "finite" : "NOT finite")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"biorthonormality", gram_identity},  {"basis convergence", basis_convergence},
      {"lambda calibration", lambda_calibration}, {"boundary structure", boundary_structure},
      {"trace", trace},                     {"weak form", weak_form},
      {"uniqueness", uniqueness},           {"norm estimate", norm_estimate},
      {"muckenhoupt toolkit", muckenhoupt}, {"young-hausdorff", young_hausdorff}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
