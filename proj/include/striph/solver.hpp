#pragma once

// Truncated biorthonormal series solution of
//   Laplace u = 0 on (0, 2pi) x (0, inf),  u(x, 0) = f(x),
//   u(0, y) = u(2pi, y),  u_x(0, y) = 0,
// with every mode bounded as y -> inf:
//   u = a0c + sum_n [(ac_n + lambda y as_n) cos nx + as_n x sin nx] e^{-ny}.

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

namespace striph {

inline constexpr double kBoundaryTol = 1e-12;
inline constexpr int kDefaultModes = 128;

/// Dirichlet datum f on J plus the Neumann datum h on the left edge.
/// An empty h means h == 0, the only case the series solver accepts.
struct BoundaryDatum {
  ScalarFunction1D f;
  std::optional<ScalarFunction1D> h;

  bool h_is_zero() const { return !h.has_value(); }
  const std::string& name() const { return f.name; }

  void check_boundary() const {
    const double f0 = f(0.0), f1 = f(kTwoPi);
    if (!(std::fabs(f0) <= kBoundaryTol) || !(std::fabs(f1) <= kBoundaryTol))
      throw BadBoundary("datum '" + f.name + "' must vanish at 0 and 2pi (got " + std::to_string(f0) + ", " +
                        std::to_string(f1) + ")");
  }
};

/// alpha d1 + beta d2, with derivatives when both carry them.
inline BoundaryDatum combine(double alpha, const BoundaryDatum& d1, double beta, const BoundaryDatum& d2) {
  BoundaryDatum out;
  const auto f1 = d1.f, f2 = d2.f;
  out.f.value = [=](double x) { return alpha * f1.value(x) + beta * f2.value(x); };
  if (f1.has_d1() && f2.has_d1()) out.f.d1 = [=](double x) { return alpha * f1.d1(x) + beta * f2.d1(x); };
  if (f1.has_d2() && f2.has_d2()) out.f.d2 = [=](double x) { return alpha * f1.d2(x) + beta * f2.d2(x); };
  out.f.smoothness = std::min(f1.smoothness, f2.smoothness);
  out.f.name = std::to_string(alpha) + "*" + f1.name + "+" + std::to_string(beta) + "*" + f2.name;
  if (!d1.h_is_zero() || !d2.h_is_zero()) {
    const auto z = [](double) { return 0.0; };
    const auto h1 = d1.h ? d1.h->value : ScalarFunction1D::Fn(z);
    const auto h2 = d2.h ? d2.h->value : ScalarFunction1D::Fn(z);
    ScalarFunction1D h;
    h.value = [=](double y) { return alpha * h1(y) + beta * h2(y); };
    h.name = "combined-h";
    out.h = h;
  }
  return out;
}

struct StripSolution {
  BiorthoSpectrum spectrum;
  int N = 0;
  double lambda = 1.0;
  std::string f_ref;
  std::optional<ScalarFunction1D> datum;  // kept for tail estimation; absent for reloaded solutions
};

inline StripSolution solve(const BoundaryDatum& d, int N, double lambda, double tol = kDefaultCoefficientTol) {
  if (!d.h_is_zero()) throw NonzeroH("the series solver covers only h == 0");
  if (N < 1) throw BadArgument("N must be >= 1");
  if (!std::isfinite(lambda)) throw BadArgument("lambda must be finite");
  d.check_boundary();
  StripSolution sol;
  sol.spectrum = biortho_coefficients(d.f.value, N, tol, d.f.name);
  sol.spectrum.validate();
  sol.N = N;
  sol.lambda = lambda;
  sol.f_ref = d.f.name;
  sol.datum = d.f;
  return sol;
}

/// All field values at (x, y) in one pass over the modes, low n to high n.
inline FieldValues eval_all(const StripSolution& sol, double x, double y) {
  const auto& s = sol.spectrum;
  const double lam = sol.lambda;
  const double c1 = std::cos(x), s1 = std::sin(x);
  const double e1 = std::exp(-y);
  double cn = 1.0, sn = 0.0, en = 1.0;
  FieldValues v;
  v.u = s.a0c;
  for (int n = 1; n <= s.N; ++n) {
    const double cnext = cn * c1 - sn * s1;
    sn = sn * c1 + cn * s1;
    cn = cnext;
    en *= e1;
    const double dn = n;
    const double ac = s.ac[static_cast<std::size_t>(n - 1)];
    const double as = s.as[static_cast<std::size_t>(n - 1)];
    const double A = (ac + lam * y * as) * en;        // cosine mode u_n^c
    const double B = as * en;                         // sine mode u_n^s
    const double Ay = lam * as * en - dn * A;
    const double Ayy = -2.0 * dn * lam * as * en + dn * dn * A;
    const double By = -dn * B;
    const double Byy = dn * dn * B;
    const double xs = x * sn;
    const double sx = sn + dn * x * cn;               // d/dx (x sin nx)

    double term = A * cn;
    term += B * xs;
    v.u += term;
    v.ux += -dn * A * sn + B * sx;
    v.uy += Ay * cn + By * xs;
    v.uxx += -dn * dn * A * cn + B * (2.0 * dn * cn - dn * dn * xs);
    v.uxy += -dn * Ay * sn + By * sx;
    v.uyy += Ayy * cn + Byy * xs;
  }
  return v;
}

inline double eval_u(const StripSolution& sol, double x, double y) { return eval_all(sol, x, y).u; }
inline double eval_ux(const StripSolution& sol, double x, double y) { return eval_all(sol, x, y).ux; }
inline double eval_uy(const StripSolution& sol, double x, double y) { return eval_all(sol, x, y).uy; }
inline double eval_uxx(const StripSolution& sol, double x, double y) { return eval_all(sol, x, y).uxx; }
inline double eval_uyy(const StripSolution& sol, double x, double y) { return eval_all(sol, x, y).uyy; }

inline StripField as_field(const StripSolution& sol) {
  StripField f;
  f.eval = [sol](double x, double y) { return eval_all(sol, x, y); };
  f.order = 2;
  f.name = "series(" + sol.f_ref + ")";
  return f;
}

/// Max of the 5-point Laplacian of u over the interior points of the grid.
template <class U>
double fd_laplacian_max(const U& u, const Grid2D& g) {
  const std::size_t nx = g.x_grid.size(), ny = g.y_grid.size();
  const auto rows = parallel_map(ny, [&](std::size_t j) {
    std::vector<double> row(nx);
    for (std::size_t i = 0; i < nx; ++i) row[i] = u(g.x_grid[i], g.y_grid[j]);
    return row;
  });
  const double hx2 = g.x_grid.h * g.x_grid.h, hy2 = g.y_grid.h * g.y_grid.h;
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < ny; ++j)
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const double c = rows[j][i];
      const double lap = (rows[j][i + 1] + rows[j][i - 1] - 2.0 * c) / hx2 + (rows[j + 1][i] + rows[j - 1][i] - 2.0 * c) / hy2;
      worst = std::max(worst, std::fabs(lap));
    }
  return worst;
}

struct LambdaCalibration {
  double lambda = 1.0;
  double residual_half = 0.0;  // max FD residual with lambda = 1/2
  double residual_one = 0.0;   // max FD residual with lambda = 1
};

/// Picks lambda in {1/2, 1} by the smaller finite-difference Laplacian residual.
/// Throws Inconclusive when the two residuals are within a factor of 10.
inline LambdaCalibration calibrate_lambda(const BoundaryDatum& test, const Grid2D& grid, int N = 16) {
  LambdaCalibration out;
  const StripSolution base = solve(test, N, 1.0);
  auto residual = [&](double lam) {
    StripSolution s = base;
    s.lambda = lam;
    return fd_laplacian_max([&](double x, double y) { return eval_u(s, x, y); }, grid);
  };
  out.residual_half = residual(0.5);
  out.residual_one = residual(1.0);
  const double lo = std::min(out.residual_half, out.residual_one);
  const double hi = std::max(out.residual_half, out.residual_one);
  if (!(hi >= 10.0 * lo) || hi == 0.0)
    throw Inconclusive("lambda residuals " + std::to_string(out.residual_half) + " (1/2) and " +
                       std::to_string(out.residual_one) + " (1) differ by less than 10x");
  out.lambda = out.residual_one < out.residual_half ? 1.0 : 0.5;
  return out;
}

enum class ModeEquationForm {
  generalized,  // (u_n^c)'' = n^2 u_n^c - 2 lambda n u_n^s
  literal       // (u_n^c)'' = n^2 u_n^c - n u_n^s
};

struct ModeResidual {
  double res_s = 0.0;
  double res_c = 0.0;
};

/// Residuals of the per-mode ODEs over the sample ordinates, using the
/// analytic second derivatives of u_n^s = as e^{-ny} and
/// u_n^c = (ac + lambda y as) e^{-ny}.
inline ModeResidual mode_ode_residual(const StripSolution& sol, int n, const std::vector<double>& y_samples,
                                      ModeEquationForm form = ModeEquationForm::generalized) {
  if (n < 1 || n > sol.spectrum.N) throw BadArgument("mode index out of range");
  const double dn = n;
  const double ac = sol.spectrum.ac[static_cast<std::size_t>(n - 1)];
  const double as = sol.spectrum.as[static_cast<std::size_t>(n - 1)];
  const double lam = sol.lambda;
  const double coupling = form == ModeEquationForm::generalized ? 2.0 * lam * dn : dn;
  ModeResidual r;
  for (double y : y_samples) {
    const double e = std::exp(-dn * y);
    const double us = as * e;
    const double us_yy = dn * dn * us;
    const double uc = (ac + lam * y * as) * e;
    const double uc_yy = -2.0 * dn * lam * as * e + dn * dn * uc;
    r.res_s = std::max(r.res_s, std::fabs(us_yy - dn * dn * us));
    r.res_c = std::max(r.res_c, std::fabs(uc_yy - dn * dn * uc + coupling * us));
  }
  return r;
}

/// Upper bound on sum_{n>N} c (1 + lambda y + 2pi) e^{-ny} / n^2, which
/// dominates the dropped modes when |ac_n|, |as_n| <= c / n^2.
inline double tail_bound(double c, int N, double y, double lambda) {
  if (c == 0.0) return 0.0;
  const double amp = c * (1.0 + std::fabs(lambda) * y + kTwoPi);
  const double n1 = N + 1.0;
  if (y <= 0.0) return amp / N;  // sum_{n>N} 1/n^2 < 1/N
  return amp * std::exp(-n1 * y) / (n1 * n1 * (1.0 - std::exp(-y)));
}

/// Decay constant for modes beyond N: from coefficients N+1..2N of the datum
/// when available, else from the upper half of the stored spectrum.
/// Entries at quadrature-noise level count as zero.
inline double tail_decay_constant(const StripSolution& sol) {
  const auto& s = sol.spectrum;
  double scale = std::fabs(s.a0c);
  for (int n = 1; n <= s.N; ++n)
    scale = std::max({scale, std::fabs(s.ac[static_cast<std::size_t>(n - 1)]), std::fabs(s.as[static_cast<std::size_t>(n - 1)])});
  const double noise = 1e-13 * std::max(scale, 1.0);
  auto fold = [&](const BiorthoSpectrum& spec, int from) {
    double c = 0.0;
    for (int n = from; n <= spec.N; ++n) {
      const double n2 = static_cast<double>(n) * n;
      for (double a : {spec.ac[static_cast<std::size_t>(n - 1)], spec.as[static_cast<std::size_t>(n - 1)]})
        if (std::fabs(a) > noise) c = std::max(c, n2 * std::fabs(a));
    }
    return c;
  };
  if (sol.datum) return fold(biortho_coefficients(sol.datum->value, 2 * s.N), s.N + 1);
  return fold(s, s.N / 2 + 1);
}

inline double tail_estimate(const StripSolution& sol, double y) {
  return tail_bound(tail_decay_constant(sol), sol.N, y, sol.lambda);
}

}  // namespace striph
