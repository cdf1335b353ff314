#pragma once

// Function representation, grids on J = (0, 2pi) and on truncated strips,
// and adaptive Gauss-Legendre quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "striph/errors.hpp"

namespace striph {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Interval {
  double a = 0.0;
  double b = kTwoPi;

  Interval() = default;
  Interval(double lo, double hi) : a(lo), b(hi) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(b > a))
      throw BadArgument("interval requires finite a < b");
  }
  double length() const { return b - a; }
};

struct Grid1D {
  std::vector<double> points;
  double h = 0.0;  // spacing for uniform grids, 0 otherwise

  std::size_t size() const { return points.size(); }
  double operator[](std::size_t i) const { return points[i]; }
};

/// Uniform grid with n points on [a, b], endpoints included exactly.
inline Grid1D make_uniform_grid1d(double a, double b, std::size_t n) {
  if (n < 2) throw BadDimension("uniform grid needs at least 2 points");
  Grid1D g;
  g.h = (b - a) / static_cast<double>(n - 1);
  g.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.points[i] = a + g.h * static_cast<double>(i);
  g.points.back() = b;
  return g;
}

/// Tensor grid on [0, 2pi] x [y_min, xi]. y_min is 0 for full strips; residual
/// sweeps lift it slightly off the boundary.
struct Grid2D {
  Grid1D x_grid;
  Grid1D y_grid;
  double xi = 1.0;
  double y_min = 0.0;

  std::string describe() const {
    return std::to_string(x_grid.size()) + "x" + std::to_string(y_grid.size()) + " on [0,2pi]x[" +
           std::to_string(y_min) + "," + std::to_string(xi) + "]";
  }
};

inline Grid2D make_uniform_grid2d(int n_x, int n_y, double xi, double y_min = 0.0) {
  if (n_x < 3 || n_y < 3) throw BadDimension("grid counts must be >= 3");
  if (!(xi > 0.0) || !std::isfinite(xi)) throw BadArgument("xi must be positive");
  if (!(y_min >= 0.0) || !(y_min < xi)) throw BadArgument("y_min must lie in [0, xi)");
  Grid2D g;
  g.x_grid = make_uniform_grid1d(0.0, kTwoPi, static_cast<std::size_t>(n_x));
  g.y_grid = make_uniform_grid1d(y_min, xi, static_cast<std::size_t>(n_y));
  g.xi = xi;
  g.y_min = y_min;
  return g;
}

enum class Smoothness { continuous, c1, c2, c_inf };

/// A real function on an interval with optional analytic derivatives.
struct ScalarFunction1D {
  using Fn = std::function<double(double)>;

  Fn value;
  Fn d1;  // empty when unavailable
  Fn d2;
  Smoothness smoothness = Smoothness::continuous;
  std::string name;

  double operator()(double x) const { return value(x); }
  bool has_d1() const { return static_cast<bool>(d1); }
  bool has_d2() const { return static_cast<bool>(d2); }

  double derivative(double x) const {
    if (!d1) throw MissingDerivative("function '" + name + "' has no first derivative");
    return d1(x);
  }
  double second_derivative(double x) const {
    if (!d2) throw MissingDerivative("function '" + name + "' has no second derivative");
    return d2(x);
  }
};

// ---------------------------------------------------------------------------
// Gauss-Legendre panel rule

inline constexpr int kPanelNodes = 10;

struct GaussLegendreRule {
  std::array<double, kPanelNodes> nodes{};    // on [-1, 1]
  std::array<double, kPanelNodes> weights{};
};

namespace detail {

inline GaussLegendreRule build_gauss_legendre() {
  GaussLegendreRule rule;
  constexpr int n = kPanelNodes;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    long double x = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (n + 0.5L));
    long double dp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double pk = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0L);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    const long double w = 2.0L / ((1.0L - x * x) * dp * dp);
    rule.nodes[i] = static_cast<double>(-x);
    rule.nodes[n - 1 - i] = static_cast<double>(x);
    rule.weights[i] = rule.weights[n - 1 - i] = static_cast<double>(w);
  }
  return rule;
}

}  // namespace detail

inline const GaussLegendreRule& gauss_legendre() {
  static const GaussLegendreRule rule = detail::build_gauss_legendre();
  return rule;
}

// ---------------------------------------------------------------------------
// Adaptive integration
//
// Integrands return either double or std::array<double, K>; array integrands
// share nodes across components and are accepted when every component is.

template <class V>
struct QuadValue;

template <>
struct QuadValue<double> {
  static constexpr std::size_t dim = 1;
  static double zero() { return 0.0; }
  static double& at(double& v, std::size_t) { return v; }
  static double at(const double& v, std::size_t) { return v; }
};

template <std::size_t K>
struct QuadValue<std::array<double, K>> {
  static constexpr std::size_t dim = K;
  static std::array<double, K> zero() { return {}; }
  static double& at(std::array<double, K>& v, std::size_t i) { return v[i]; }
  static double at(const std::array<double, K>& v, std::size_t i) { return v[i]; }
};

struct QuadratureOptions {
  int max_depth = 40;
  int initial_panels = 8;
  long max_evaluations = 4'000'000;  // per call; exhausted budget accepts the remaining panels unconverged
};

template <class V>
struct BasicQuadratureResult {
  V value = QuadValue<V>::zero();
  double error = 0.0;       // estimated absolute error (max over components)
  bool converged = true;    // false: depth cap hit before tol (ToleranceNotReached)
  int depth_reached = 0;
  long evaluations = 0;

  void absorb(const BasicQuadratureResult& r) {
    for (std::size_t i = 0; i < QuadValue<V>::dim; ++i)
      QuadValue<V>::at(value, i) += QuadValue<V>::at(r.value, i);
    error += r.error;
    converged = converged && r.converged;
    depth_reached = std::max(depth_reached, r.depth_reached);
    evaluations += r.evaluations;
  }
};

using QuadratureResult = BasicQuadratureResult<double>;

namespace detail {

template <class F>
using integrand_value_t = std::decay_t<std::invoke_result_t<const F&, double>>;

// Panel sum of f; `mass` receives the same rule applied to |f| (rounding scale).
template <class F, class V = integrand_value_t<F>>
V gl_panel(const F& f, double a, double b, long& evals, V* mass = nullptr) {
  using T = QuadValue<V>;
  const auto& rule = gauss_legendre();
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  V sum = T::zero();
  V abs_sum = T::zero();
  for (int i = 0; i < kPanelNodes; ++i) {
    const double x = c + r * rule.nodes[i];
    const V v = f(x);
    for (std::size_t j = 0; j < T::dim; ++j) {
      const double vj = T::at(v, j);
      if (!std::isfinite(vj)) throw NonFinite("integrand is not finite at x = " + std::to_string(x));
      T::at(sum, j) += rule.weights[i] * vj;
      T::at(abs_sum, j) += rule.weights[i] * std::fabs(vj);
    }
  }
  evals += kPanelNodes;
  for (std::size_t j = 0; j < T::dim; ++j) {
    T::at(sum, j) *= r;
    T::at(abs_sum, j) *= std::fabs(r);
  }
  if (mass) *mass = abs_sum;
  return sum;
}

template <class F, class V>
void adapt(const F& f, double a, double b, const V& whole, double tol, int depth,
           const QuadratureOptions& opts, BasicQuadratureResult<V>& out) {
  using T = QuadValue<V>;
  const double m = 0.5 * (a + b);
  V left_mass, right_mass;
  const V left = gl_panel(f, a, m, out.evaluations, &left_mass);
  const V right = gl_panel(f, m, b, out.evaluations, &right_mass);
  bool accept = true;
  double err_max = 0.0;
  for (std::size_t j = 0; j < T::dim; ++j) {
    const double l = T::at(left, j), r = T::at(right, j);
    const double err = std::fabs(l + r - T::at(whole, j));
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (T::at(left_mass, j) + T::at(right_mass, j));
    err_max = std::max(err_max, err);
    if (err > std::max(tol, floor)) accept = false;
  }
  out.depth_reached = std::max(out.depth_reached, depth);
  const bool resolvable = m > a && m < b;
  if (accept || !resolvable || depth >= opts.max_depth || out.evaluations >= opts.max_evaluations) {
    for (std::size_t j = 0; j < T::dim; ++j)
      T::at(out.value, j) += T::at(left, j) + T::at(right, j);
    out.error += err_max;
    if (!accept) out.converged = false;
    return;
  }
  adapt(f, a, m, left, 0.5 * tol, depth + 1, opts, out);
  adapt(f, m, b, right, 0.5 * tol, depth + 1, opts, out);
}

}  // namespace detail

/// Adaptive dyadic Gauss-Legendre quadrature of f over [I.a, I.b].
/// Throws NonFinite when f is NaN or infinite at a node.
template <class F, class V = detail::integrand_value_t<F>>
BasicQuadratureResult<V> integrate(const F& f, const Interval& I, double tol,
                                   const QuadratureOptions& opts = {}) {
  if (!(tol > 0.0)) throw BadArgument("quadrature tolerance must be positive");
  BasicQuadratureResult<V> out;
  const int panels = std::max(1, opts.initial_panels);
  const double w = I.length() / panels;
  for (int k = 0; k < panels; ++k) {
    const double a = I.a + w * k;
    const double b = (k + 1 == panels) ? I.b : I.a + w * (k + 1);
    const V whole = detail::gl_panel(f, a, b, out.evaluations);
    detail::adapt(f, a, b, whole, tol / panels, 0, opts, out);
  }
  return out;
}

namespace detail {

// Integral of f between s and s + d where f may blow up (integrably) at s.
// The segment is cut into dyadic shells [s + d/2^(k+1), s + d/2^k]; once the
// ratio of consecutive shells settles, the remaining geometric tail is added
// in closed form. A settled ratio >= 0.99 means the integral diverges.
template <class F, class V = integrand_value_t<F>>
BasicQuadratureResult<V> integrate_towards_singularity(const F& f, double s, double d, double tol,
                                                       const QuadratureOptions& opts) {
  using T = QuadValue<V>;
  constexpr std::size_t K = T::dim;
  constexpr int kMaxShells = 70;
  constexpr double kDivergentRatio = 0.99;
  constexpr int kDivergentStreak = 8;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  BasicQuadratureResult<V> out;
  const double min_offset = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(s));
  std::array<double, K> prev{}, prev_ratio, tail{}, tail_err{};
  std::array<int, K> divergent_streak{};
  std::array<bool, K> closed{};
  prev_ratio.fill(nan);
  auto all_closed = [&] { return std::all_of(closed.begin(), closed.end(), [](bool c) { return c; }); };

  for (int k = 0; k < kMaxShells && !all_closed(); ++k) {
    const double outer = d * std::ldexp(1.0, -k);
    const double inner = 0.5 * outer;
    if (std::fabs(inner) < min_offset) break;
    const double lo = std::min(s + inner, s + outer);
    const double hi = std::max(s + inner, s + outer);
    if (!(hi > lo)) break;
    QuadratureOptions shell_opts = opts;
    shell_opts.initial_panels = 1;
    const auto piece = integrate(f, Interval(lo, hi), 0.25 * tol, shell_opts);
    out.error += piece.error;
    out.evaluations += piece.evaluations;
    out.converged = out.converged && piece.converged;
    out.depth_reached = std::max(out.depth_reached, piece.depth_reached + k);
    for (std::size_t j = 0; j < K; ++j) {
      if (closed[j]) continue;  // component already summed to tolerance
      const double p = T::at(piece.value, j);
      T::at(out.value, j) += p;
      if (k > 0) {
        if (p == 0.0 && prev[j] == 0.0) {
          closed[j] = true;
        } else if (prev[j] != 0.0) {
          const double ratio = p / prev[j];
          // Oscillatory integrands give erratic ratios on coarse shells; only a
          // settled ratio counts towards divergence.
          const bool settled = std::isfinite(prev_ratio[j]) &&
                               std::fabs(ratio - prev_ratio[j]) <= 0.05 * std::max(1.0, std::fabs(ratio));
          if (ratio >= kDivergentRatio && settled) {
            if (++divergent_streak[j] >= kDivergentStreak)
              throw NotIntegrable("integrand is not integrable near x = " + std::to_string(s));
          } else {
            divergent_streak[j] = 0;
          }
          if (std::isfinite(prev_ratio[j]) && ratio >= 0.0 && ratio < kDivergentRatio) {
            tail[j] = p * ratio / (1.0 - ratio);
            const double drift = std::fabs(ratio - prev_ratio[j]);
            tail_err[j] = std::fabs(tail[j]) * drift / (1.0 - ratio) + std::fabs(p) * 1e-16;
            if (std::fabs(tail[j]) <= 0.1 * tol || (k >= 6 && tail_err[j] <= 0.1 * tol)) {
              T::at(out.value, j) += tail[j];
              closed[j] = true;
            }
          } else {
            tail[j] = 0.0;
            tail_err[j] = std::fabs(p);
          }
          prev_ratio[j] = ratio;
        }
      }
      prev[j] = p;
    }
  }
  double extra_err = 0.0;
  for (std::size_t j = 0; j < K; ++j) {
    if (closed[j]) continue;
    // Shell budget or floating resolution exhausted: close with the last ratio.
    if (std::isfinite(prev_ratio[j]) && prev_ratio[j] >= kDivergentRatio)
      throw NotIntegrable("integrand is not integrable near x = " + std::to_string(s));
    T::at(out.value, j) += tail[j];
    extra_err = std::max(extra_err, tail_err[j]);
  }
  out.error += extra_err;
  if (extra_err > tol) out.converged = false;
  return out;  // positively oriented: over [s, s + d] or [s + d, s]
}

}  // namespace detail

/// Integral of f over I, splitting at the given singular abscissae and
/// treating the pieces adjacent to them with shell extrapolation.
/// Throws NotIntegrable if a singularity is numerically non-integrable.
template <class F, class V = detail::integrand_value_t<F>>
BasicQuadratureResult<V> integrate_split(const F& f, const Interval& I, std::span<const double> singular,
                                         double tol, const QuadratureOptions& opts = {}) {
  const double snap = 1e-13 * std::max(1.0, std::max(std::fabs(I.a), std::fabs(I.b)));
  auto is_singular = [&](double x) {
    return std::any_of(singular.begin(), singular.end(), [&](double s) { return std::fabs(s - x) <= snap; });
  };
  std::vector<double> cuts{I.a};
  for (double s : singular)
    if (s > I.a + snap && s < I.b - snap) cuts.push_back(s);
  cuts.push_back(I.b);
  std::sort(cuts.begin(), cuts.end());

  BasicQuadratureResult<V> total;
  const double seg_tol = tol / static_cast<double>(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const bool sa = is_singular(a), sb = is_singular(b);
    QuadratureOptions seg_opts = opts;
    seg_opts.initial_panels = std::max(1, static_cast<int>(std::ceil(opts.initial_panels * (b - a) / I.length())));
    if (!sa && !sb) {
      total.absorb(integrate(f, Interval(a, b), seg_tol, seg_opts));
    } else if (sa && sb) {
      const double m = 0.5 * (a + b);
      total.absorb(detail::integrate_towards_singularity(f, a, m - a, 0.5 * seg_tol, seg_opts));
      total.absorb(detail::integrate_towards_singularity(f, b, m - b, 0.5 * seg_tol, seg_opts));
    } else if (sa) {
      total.absorb(detail::integrate_towards_singularity(f, a, b - a, seg_tol, seg_opts));
    } else {
      total.absorb(detail::integrate_towards_singularity(f, b, a - b, seg_tol, seg_opts));
    }
  }
  return total;
}

}  // namespace striph
