#pragma once

// Measured residuals for series solutions: Laplacian (analytic and 5-point),
// weak form against product test functions, boundary structure and trace,
// strip-norm estimate ratios, and linearity.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "striph/basis.hpp"
#include "striph/errors.hpp"
#include "striph/field.hpp"
#include "striph/parallel.hpp"
#include "striph/quadrature.hpp"
#include "striph/solver.hpp"
#include "striph/weights.hpp"

namespace striph {

// ---------------------------------------------------------------------------
// Test functions phi(x, y) = eta(x) psi(y)

struct TestFunction {
  ScalarFunction1D eta;  // on J, eta(2pi) = 0
  ScalarFunction1D psi;  // supported in (0, xi_phi)
  double xi_phi = 2.0;
  std::string name;

  void validate() const {
    if (!eta.has_d1() || !psi.has_d1()) throw MissingDerivative("test function '" + name + "' needs eta' and psi'");
    if (!(xi_phi > 0.0) || !std::isfinite(xi_phi)) throw BadArgument("test support bound must be positive");
    if (!(std::fabs(eta(kTwoPi)) <= 1e-12)) throw BadBoundary("test function '" + name + "' needs eta(2pi) = 0");
  }
};

/// exp(-1/(1-t^2)) with t = 2y/xi - 1, zero outside (0, xi).
inline ScalarFunction1D bump_psi(double xi) {
  if (!(xi > 0.0)) throw BadArgument("bump support must be positive");
  ScalarFunction1D f;
  f.value = [xi](double y) {
    const double t = 2.0 * y / xi - 1.0;
    const double q = 1.0 - t * t;
    return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
  };
  f.d1 = [xi](double y) {
    const double t = 2.0 * y / xi - 1.0;
    const double q = 1.0 - t * t;
    if (!(q > 0.0)) return 0.0;
    return std::exp(-1.0 / q) * (-2.0 * t / (q * q)) * (2.0 / xi);
  };
  f.smoothness = Smoothness::c_inf;
  f.name = "bump(0," + std::to_string(xi) + ")";
  return f;
}

inline ScalarFunction1D eta_sine(int n) {
  ScalarFunction1D f;
  f.value = [n](double x) { return std::sin(n * x); };
  f.d1 = [n](double x) { return n * std::cos(n * x); };
  f.d2 = [n](double x) { return -double(n) * n * std::sin(n * x); };
  f.smoothness = Smoothness::c_inf;
  f.name = "sin(" + std::to_string(n) + "x)";
  return f;
}

/// x (2pi - x) cos nx
inline ScalarFunction1D eta_weighted_cosine(int n) {
  ScalarFunction1D f;
  f.value = [n](double x) { return x * (kTwoPi - x) * std::cos(n * x); };
  f.d1 = [n](double x) { return (kTwoPi - 2.0 * x) * std::cos(n * x) - n * x * (kTwoPi - x) * std::sin(n * x); };
  f.smoothness = Smoothness::c_inf;
  f.name = "x(2pi-x)cos(" + std::to_string(n) + "x)";
  return f;
}

/// sin nx (n = 1..8) and x(2pi-x) cos nx (n = 0..7), each times one bump.
inline std::vector<TestFunction> standard_test_battery(double xi_phi = 2.0) {
  std::vector<TestFunction> out;
  const ScalarFunction1D psi = bump_psi(xi_phi);
  for (int n = 1; n <= 8; ++n) out.push_back({eta_sine(n), psi, xi_phi, eta_sine(n).name});
  for (int n = 0; n <= 7; ++n) out.push_back({eta_weighted_cosine(n), psi, xi_phi, eta_weighted_cosine(n).name});
  return out;
}

// ---------------------------------------------------------------------------
// Laplacian

enum class LaplacianMode { analytic, finite_difference };

struct LaplacianResidual {
  double max_res = 0.0;
  double order = 0.0;  // observed order under h -> h/2; 0 in analytic mode or when both residuals vanish
  double refined_max_res = 0.0;
};

/// Same box, twice the resolution.
inline Grid2D refine(const Grid2D& g) {
  return make_uniform_grid2d(static_cast<int>(2 * g.x_grid.size() - 1), static_cast<int>(2 * g.y_grid.size() - 1), g.xi,
                             g.y_min);
}

inline LaplacianResidual laplacian_residual(const StripSolution& sol, const Grid2D& grid, LaplacianMode mode) {
  if (grid.x_grid.size() < 3 || grid.y_grid.size() < 3) throw BadDimension("grid has no interior points");
  LaplacianResidual r;
  if (mode == LaplacianMode::analytic) {
    const std::size_t nx = grid.x_grid.size(), ny = grid.y_grid.size();
    const auto rows = parallel_map(ny - 2, [&](std::size_t j) {
      double worst = 0.0;
      for (std::size_t i = 1; i + 1 < nx; ++i) {
        const FieldValues v = eval_all(sol, grid.x_grid[i], grid.y_grid[j + 1]);
        worst = std::max(worst, std::fabs(v.uxx + v.uyy));
      }
      return worst;
    });
    for (double w : rows) r.max_res = std::max(r.max_res, w);
    r.refined_max_res = r.max_res;
    return r;
  }
  auto u = [&](double x, double y) { return eval_u(sol, x, y); };
  r.max_res = fd_laplacian_max(u, grid);
  r.refined_max_res = fd_laplacian_max(u, refine(grid));
  if (r.max_res > 0.0 && r.refined_max_res > 0.0) r.order = std::log2(r.max_res / r.refined_max_res);
  return r;
}

// ---------------------------------------------------------------------------
// Weak form

inline constexpr double kWeakFormTol = 1e-9;

/// For each test phi: | iint (u_x phi_x + u_y phi_y) + int phi(0, y) h(y) dy |
/// over (0, 2pi) x (0, xi_phi), by iterated Gauss-Legendre quadrature.
inline std::vector<double> weak_form_residual(const StripField& u, const std::optional<ScalarFunction1D>& h,
                                              const std::vector<TestFunction>& tests, double tol = kWeakFormTol,
                                              int x_panels = 16) {
  if (u.order < 1) throw MissingDerivative("weak form needs the gradient of '" + u.name + "'");
  for (const auto& t : tests) t.validate();
  using Arr = std::array<double, 2>;
  return parallel_map(tests.size(), [&](std::size_t k) {
    const TestFunction& t = tests[k];
    const double eta0 = t.eta(0.0);
    auto slice = [&](double y) {
      const double ps = t.psi(y), dps = t.psi.d1(y);
      if (ps == 0.0 && dps == 0.0) return 0.0;
      auto integrand = [&](double x) {
        const FieldValues v = u(x, y);
        return Arr{v.ux * t.eta.d1(x), v.uy * t.eta(x)};
      };
      const Arr in = integrate(integrand, Interval(0.0, kTwoPi), 0.1 * tol / t.xi_phi,
                               {.max_depth = 30, .initial_panels = x_panels})
                         .value;
      double s = ps * in[0] + dps * in[1];
      if (h) s += eta0 * ps * h->value(y);
      return s;
    };
    const double total = integrate(slice, Interval(0.0, t.xi_phi), tol, {.max_depth = 30, .initial_panels = 8}).value;
    return std::fabs(total);
  });
}

// ---------------------------------------------------------------------------
// Boundary structure and trace

struct TraceSample {
  double y = 0.0;
  double error = 0.0;  // ||u(., y) - f||_{L^p_nu(J)}
};

struct BoundaryReport {
  double periodicity_max = 0.0;
  double ux_at_0_max = 0.0;
  double trace_error = 0.0;      // ||S_{N,N} f - f||_{L^p_nu(J)}, i.e. the exact y = 0 trace
  double trace_sup_error = 0.0;  // max over x_samples of |u(x, 0) - f(x)|
  std::vector<TraceSample> trace_decay;
};

/// y = 1, 1/2, ..., 2^-10
inline std::vector<double> trace_ladder() {
  std::vector<double> ys;
  for (int k = 0; k <= 10; ++k) ys.push_back(std::ldexp(1.0, -k));
  return ys;
}

inline double trace_error_at(const StripSolution& sol, const ScalarFunction1D& f, double y, const Weight& w, double p,
                             double tol = kDefaultNormTol) {
  const QuadratureOptions opts{.max_depth = 40, .initial_panels = panels_for_frequency(sol.N)};
  auto diff = [&](double x) { return eval_u(sol, x, y) - f(x); };
  return weighted_lp_norm_J(diff, w, p, tol, opts);
}

inline BoundaryReport boundary_report(const StripSolution& sol, const std::vector<double>& y_samples,
                                      const std::vector<double>& x_samples, const Weight& w, double p) {
  if (!sol.datum) throw BadArgument("boundary report needs the datum the solution was built from");
  const ScalarFunction1D& f = *sol.datum;
  BoundaryReport r;
  for (double y : y_samples) {
    r.periodicity_max = std::max(r.periodicity_max, std::fabs(eval_u(sol, 0.0, y) - eval_u(sol, kTwoPi, y)));
    r.ux_at_0_max = std::max(r.ux_at_0_max, std::fabs(eval_ux(sol, 0.0, y)));
  }
  for (double x : x_samples) r.trace_sup_error = std::max(r.trace_sup_error, std::fabs(eval_u(sol, x, 0.0) - f(x)));
  r.trace_error = trace_error_at(sol, f, 0.0, w, p);
  const auto errs = parallel_map(y_samples.size(), [&](std::size_t k) { return trace_error_at(sol, f, y_samples[k], w, p); });
  for (std::size_t k = 0; k < y_samples.size(); ++k) r.trace_decay.push_back({y_samples[k], errs[k]});
  return r;
}

// ---------------------------------------------------------------------------
// Norm estimate

inline constexpr double kStripNormTol = 1e-8;

/// ||u||_{W^{1,p}_nu(Pi_xi)} (mixed) / ||f||_{W^{1,p}_nu(J)}; empty for f == 0.
inline std::optional<double> norm_estimate_ratio(const StripSolution& sol, const BoundaryDatum& f, const Weight& w,
                                                 double p, double xi, double tol = kStripNormTol) {
  const double denom = weighted_w1p_norm_J(f.f, w, p);
  if (!(denom > 0.0)) return std::nullopt;
  const double num = strip_norm(as_field(sol), {p, w, NormKind::W1p_Pi_mixed}, xi, tol);
  return num / denom;
}

inline std::vector<double> xi_ladder() { return {1.0, 2.0, 4.0, 8.0}; }

struct NormLadder {
  std::vector<double> xis;
  std::vector<double> ratios;
  double sup = 0.0;
  double probe_ratio = 0.0;  // at 2 x the top rung
  double xi_drift = 0.0;     // |probe - top| / probe
};

/// Ratios on the xi ladder plus one probe beyond it. Increments of the mixed
/// norm are positive, so the ladder sup sits at its top rung.
inline std::optional<NormLadder> norm_estimate_ladder(const StripSolution& sol, const BoundaryDatum& f, const Weight& w,
                                                      double p, std::vector<double> xis = xi_ladder(),
                                                      double tol = kStripNormTol) {
  if (xis.empty()) throw BadArgument("empty xi ladder");
  const double denom = weighted_w1p_norm_J(f.f, w, p);
  if (!(denom > 0.0)) return std::nullopt;
  NormLadder out;
  out.xis = xis;
  const StripField field = as_field(sol);
  for (double xi : xis) {
    out.ratios.push_back(strip_norm(field, {p, w, NormKind::W1p_Pi_mixed}, xi, tol) / denom);
    out.sup = std::max(out.sup, out.ratios.back());
  }
  out.probe_ratio = strip_norm(field, {p, w, NormKind::W1p_Pi_mixed}, 2.0 * xis.back(), tol) / denom;
  out.xi_drift = std::fabs(out.probe_ratio - out.ratios.back()) / out.probe_ratio;
  return out;
}

namespace detail {

inline ScalarFunction1D make_fn(std::string name, ScalarFunction1D::Fn f, ScalarFunction1D::Fn d1) {
  ScalarFunction1D out;
  out.value = std::move(f);
  out.d1 = std::move(d1);
  out.smoothness = Smoothness::c_inf;
  out.name = std::move(name);
  return out;
}

}  // namespace detail

/// Ten data f = x h(x) with h(2pi - x) = -h(x) and h(0) = 0. These vanish at
/// both ends and have a0c = 0, so every mode of u decays in y and the mixed
/// strip norm stays bounded as xi grows.
inline std::vector<ScalarFunction1D> norm_corpus() {
  using std::cos;
  using std::exp;
  using std::sin;
  std::vector<ScalarFunction1D> c;
  for (int k = 1; k <= 3; ++k)
    c.push_back(detail::make_fn(
        "x*sin(" + std::to_string(k) + "x)", [k](double x) { return x * sin(k * x); },
        [k](double x) { return sin(k * x) + k * x * cos(k * x); }));
  c.push_back(detail::make_fn(
      "x*sin(x)*cos(2x)", [](double x) { return x * sin(x) * cos(2 * x); },
      [](double x) { return sin(x) * cos(2 * x) + x * (cos(x) * cos(2 * x) - 2 * sin(x) * sin(2 * x)); }));
  c.push_back(detail::make_fn(
      "x*sin(x)*exp(cos(x))", [](double x) { return x * sin(x) * exp(cos(x)); },
      [](double x) { return exp(cos(x)) * (sin(x) + x * cos(x) - x * sin(x) * sin(x)); }));
  c.push_back(detail::make_fn(
      "x*sin(x)/(2+cos(x))", [](double x) { return x * sin(x) / (2 + cos(x)); },
      [](double x) {
        const double q = 2 + cos(x);
        return (sin(x) + x * cos(x)) / q + x * sin(x) * sin(x) / (q * q);
      }));
  // g(x) = (pi - x)^k sin^2(x/2), k odd
  auto poly_bump = [](int k, double x) { return std::pow(kPi - x, k) * sin(0.5 * x) * sin(0.5 * x); };
  auto poly_bump_d = [](int k, double x) {
    return -k * std::pow(kPi - x, k - 1) * sin(0.5 * x) * sin(0.5 * x) + std::pow(kPi - x, k) * 0.5 * sin(x);
  };
  for (int k : {1, 3})
    c.push_back(detail::make_fn(
        "x*(pi-x)^" + std::to_string(k) + "*sin^2(x/2)", [=](double x) { return x * poly_bump(k, x); },
        [=](double x) { return poly_bump(k, x) + x * poly_bump_d(k, x); }));
  c.push_back(detail::make_fn(
      "x*(pi-x)*sin^2(x/2)*cos(x)", [=](double x) { return x * poly_bump(1, x) * cos(x); },
      [=](double x) { return (poly_bump(1, x) + x * poly_bump_d(1, x)) * cos(x) - x * poly_bump(1, x) * sin(x); }));
  c.push_back(detail::make_fn(
      "x*(pi-x)*sin^2(x/2)*exp(cos(x))", [=](double x) { return x * poly_bump(1, x) * exp(cos(x)); },
      [=](double x) {
        return exp(cos(x)) * (poly_bump(1, x) + x * poly_bump_d(1, x) - x * poly_bump(1, x) * sin(x));
      }));
  return c;
}

/// Trigonometric polynomials of degree <= 5, for Parseval and Young-Hausdorff runs.
inline std::vector<ScalarFunction1D> band_limited_corpus() {
  using std::cos;
  using std::sin;
  std::vector<ScalarFunction1D> c;
  c.push_back(detail::make_fn("sin(x)", [](double x) { return sin(x); }, [](double x) { return cos(x); }));
  c.push_back(detail::make_fn("1+cos(x)", [](double x) { return 1 + cos(x); }, [](double x) { return -sin(x); }));
  c.push_back(detail::make_fn(
      "cos(2x)+0.5sin(3x)", [](double x) { return cos(2 * x) + 0.5 * sin(3 * x); },
      [](double x) { return -2 * sin(2 * x) + 1.5 * cos(3 * x); }));
  c.push_back(detail::make_fn(
      "0.2+sin(x)-0.3cos(4x)+0.1sin(5x)", [](double x) { return 0.2 + sin(x) - 0.3 * cos(4 * x) + 0.1 * sin(5 * x); },
      [](double x) { return cos(x) + 1.2 * sin(4 * x) + 0.5 * cos(5 * x); }));
  c.push_back(detail::make_fn(
      "sin(x)^3", [](double x) { return sin(x) * sin(x) * sin(x); },
      [](double x) { return 3 * sin(x) * sin(x) * cos(x); }));
  return c;
}

// ---------------------------------------------------------------------------
// Strong solution check

struct ResidualReport {
  double laplacian_max = 0.0;        // analytic
  double laplacian_order = 0.0;      // finite-difference refinement order
  double fd_laplacian_max = 0.0;
  std::vector<double> weak_residuals;
  std::vector<std::string> weak_tests;
  double ux_at_0_max = 0.0;
  double periodicity_max = 0.0;
  double trace_error = 0.0;          // exact y = 0 trace
  double trace_error_ymin = 0.0;     // ||u(., y_min) - f||
  std::vector<TraceSample> trace_decay;
  std::optional<double> norm_ratio;  // empty when f == 0
  std::vector<double> w2_xis;
  std::vector<double> w2_norms;
  bool w2_stable = false;
  bool harmonic = false;
  double tail = 0.0;                 // tail_estimate at y_min
  double lambda_used = 1.0;
  int N = 0;
  std::string grid;
  // provenance
  std::string f_name;
  std::string weight_name;
  double p = 2.0;
  double xi = 0.0;
  double weak_tol = kWeakFormTol;
  double norm_tol = kStripNormTol;
};

struct StrongCheckOptions {
  std::optional<Grid2D> grid;  // default 33x33 on [0,2pi]x[1e-3, xi]
  double weak_tol = kWeakFormTol;
  double norm_tol = kStripNormTol;
  double harmonic_tol = 1e-8;
  double w2_stability = 0.01;
};

inline ResidualReport strong_solution_check(const StripSolution& sol, const Weight& w, double p, double xi,
                                            const StrongCheckOptions& opt = {}) {
  if (!sol.datum) throw BadArgument("strong check needs the datum the solution was built from");
  const Grid2D grid = opt.grid ? *opt.grid : make_uniform_grid2d(33, 33, xi, 1e-3);
  ResidualReport r;
  r.lambda_used = sol.lambda;
  r.N = sol.N;
  r.grid = grid.describe();
  r.f_name = sol.f_ref;
  r.weight_name = w.descriptor;
  r.p = p;
  r.xi = xi;
  r.weak_tol = opt.weak_tol;
  r.norm_tol = opt.norm_tol;

  const LaplacianResidual an = laplacian_residual(sol, grid, LaplacianMode::analytic);
  const LaplacianResidual fd = laplacian_residual(sol, grid, LaplacianMode::finite_difference);
  r.laplacian_max = an.max_res;
  r.fd_laplacian_max = fd.max_res;
  r.laplacian_order = fd.order;
  r.tail = tail_estimate(sol, grid.y_min);
  r.harmonic = r.laplacian_max <= opt.harmonic_tol + r.tail;

  const StripField field = as_field(sol);
  const auto tests = standard_test_battery();
  r.weak_residuals = weak_form_residual(field, std::nullopt, tests, opt.weak_tol);
  for (const auto& t : tests) r.weak_tests.push_back(t.name);

  std::vector<double> xs;
  for (int i = 0; i <= 64; ++i) xs.push_back(kTwoPi * i / 64.0);
  const BoundaryReport b = boundary_report(sol, trace_ladder(), xs, w, p);
  r.periodicity_max = b.periodicity_max;
  r.ux_at_0_max = b.ux_at_0_max;
  r.trace_error = b.trace_error;
  r.trace_decay = b.trace_decay;
  r.trace_error_ymin = trace_error_at(sol, *sol.datum, grid.y_min, w, p);

  BoundaryDatum d{*sol.datum, std::nullopt};
  if (d.f.has_d1()) r.norm_ratio = norm_estimate_ratio(sol, d, w, p, xi, opt.norm_tol);

  r.w2_xis = {0.25 * xi, 0.5 * xi, xi};
  for (double z : r.w2_xis) r.w2_norms.push_back(strip_norm(field, {p, w, NormKind::W2p_Pi_mixed}, z, opt.norm_tol));
  const double top = r.w2_norms.back(), mid = r.w2_norms[1];
  r.w2_stable = std::isfinite(top) && (top == 0.0 || std::fabs(top - mid) <= opt.w2_stability * top);
  return r;
}

// ---------------------------------------------------------------------------
// Linearity

/// max over probes of |u_{a f1 + b f2} - a u_{f1} - b u_{f2}|
inline double superposition_check(const BoundaryDatum& f1, const BoundaryDatum& f2, double alpha, double beta,
                                  const std::vector<std::pair<double, double>>& probes, int N = kDefaultModes,
                                  double lambda = 1.0) {
  const StripSolution s1 = solve(f1, N, lambda);
  const StripSolution s2 = solve(f2, N, lambda);
  const StripSolution s12 = solve(combine(alpha, f1, beta, f2), N, lambda);
  double worst = 0.0;
  for (const auto& [x, y] : probes)
    worst = std::max(worst, std::fabs(eval_u(s12, x, y) - alpha * eval_u(s1, x, y) - beta * eval_u(s2, x, y)));
  return worst;
}

inline std::vector<std::pair<double, double>> default_probes() {
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i <= 8; ++i)
    for (double y : {0.0, 0.01, 0.1, 0.5, 1.0, 3.0}) out.emplace_back(kTwoPi * i / 8.0, y);
  return out;
}

}  // namespace striph
