#pragma once

// 2pi-periodic weights, Muckenhoupt A_p constant estimation, reverse Hoelder
// probing, and the weighted norms on J and on truncated strips.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "striph/errors.hpp"
#include "striph/field.hpp"
#include "striph/parallel.hpp"
#include "striph/quadrature.hpp"

namespace striph {

/// A nonnegative 2pi-periodic weight. The evaluator accepts any real x.
/// `singular_points` lists the abscissae in [0, 2pi) where the weight is 0 or
/// infinite; quadrature splits there.
struct Weight {
  ScalarFunction1D evaluator;
  std::vector<double> singular_points;
  std::string descriptor;

  double operator()(double x) const { return evaluator.value(x); }

  /// Singular abscissae inside [0, 2pi], listing both ends when 0 is singular.
  std::vector<double> singular_points_on_J() const {
    std::vector<double> out;
    for (double s : singular_points) {
      out.push_back(s);
      if (s == 0.0) out.push_back(kTwoPi);
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

inline double wrap_period(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

inline Weight weight_one() {
  Weight w;
  w.evaluator.value = [](double) { return 1.0; };
  w.evaluator.smoothness = Smoothness::c_inf;
  w.evaluator.name = w.descriptor = "one";
  return w;
}

/// |sin(x/2)|^alpha: zero (alpha > 0) or infinite (alpha < 0) at multiples of 2pi.
inline Weight weight_power(double alpha) {
  Weight w;
  w.evaluator.value = [alpha](double x) { return std::pow(std::fabs(std::sin(0.5 * x)), alpha); };
  w.evaluator.smoothness = Smoothness::continuous;
  if (alpha != 0.0) w.singular_points = {0.0};
  std::ostringstream os;
  os << "power:alpha=" << alpha;
  w.evaluator.name = w.descriptor = os.str();
  return w;
}

/// c + sin x with c > 1.
inline Weight weight_shifted(double c) {
  if (!(c > 1.0)) throw BadArgument("shifted weight requires c > 1");
  Weight w;
  w.evaluator.value = [c](double x) { return c + std::sin(x); };
  w.evaluator.smoothness = Smoothness::c_inf;
  std::ostringstream os;
  os << "shifted:c=" << c;
  w.evaluator.name = w.descriptor = os.str();
  return w;
}

inline Weight scaled(const Weight& w, double c) {
  if (!(c > 0.0)) throw BadArgument("weight scale must be positive");
  Weight out = w;
  auto inner = w.evaluator.value;
  out.evaluator.value = [inner, c](double x) { return c * inner(x); };
  std::ostringstream os;
  os << c << "*" << w.descriptor;
  out.descriptor = out.evaluator.name = os.str();
  return out;
}

/// Piecewise-linear periodic weight through samples (x_i, nu_i), x strictly
/// increasing within [0, 2pi]. Samples with nu == 0 become singular points.
inline Weight weight_from_samples(std::vector<double> xs, std::vector<double> nus, std::string name) {
  if (xs.size() != nus.size() || xs.size() < 2) throw MalformedCSV("weight needs at least two samples");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(nus[i])) throw MalformedCSV("non-finite weight sample");
    if (nus[i] < 0.0) throw MalformedCSV("negative weight sample");
    if (xs[i] < 0.0 || xs[i] > kTwoPi + 1e-12) throw MalformedCSV("weight abscissa outside [0, 2pi]");
    if (i > 0 && !(xs[i] > xs[i - 1])) throw NonMonotoneAbscissae("weight abscissae must increase");
  }
  // Close the period so that interpolation wraps from the last sample to the first.
  if (xs.back() < kTwoPi) {
    const double x0 = xs.front() + kTwoPi;
    if (x0 > xs.back()) {
      xs.push_back(x0);
      nus.push_back(nus.front());
    }
  }
  Weight w;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (nus[i] == 0.0) w.singular_points.push_back(wrap_period(xs[i]));
  std::sort(w.singular_points.begin(), w.singular_points.end());
  w.singular_points.erase(std::unique(w.singular_points.begin(), w.singular_points.end()),
                          w.singular_points.end());
  w.evaluator.value = [xs, nus](double x) {
    double t = wrap_period(x);
    if (t < xs.front()) t += kTwoPi;
    const auto it = std::upper_bound(xs.begin(), xs.end(), t);
    if (it == xs.end()) return nus.back();
    if (it == xs.begin()) return nus.front();
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double s = (t - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return (1.0 - s) * nus[j - 1] + s * nus[j];
  };
  w.evaluator.name = w.descriptor = std::move(name);
  return w;
}

/// Named presets: "one", "power:alpha=<a>", "shifted:c=<c>".
inline Weight weight_from_preset(const std::string& spec) {
  auto parse_value = [&](const std::string& prefix) -> double {
    const std::string rest = spec.substr(prefix.size());
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      throw UnknownPreset("cannot parse weight preset '" + spec + "'");
    }
    if (used != rest.size()) throw UnknownPreset("cannot parse weight preset '" + spec + "'");
    return v;
  };
  if (spec == "one") return weight_one();
  if (spec.rfind("power:alpha=", 0) == 0) return weight_power(parse_value("power:alpha="));
  if (spec.rfind("shifted:c=", 0) == 0) return weight_shifted(parse_value("shifted:c="));
  throw UnknownPreset("unknown weight preset '" + spec + "'");
}

// ---------------------------------------------------------------------------
// Interval-family scans

/// Integrals of transform(nu) over the R cells [2pi i/R, 2pi (i+1)/R].
/// Cells in the upper half period are integrated one period to the left so
/// that singular points near 2pi are resolved close to 0.
template <class Transform>
std::vector<double> weight_cell_integrals(const Weight& w, Transform transform, int resolution,
                                          double rel_tol = 1e-13) {
  const double h = kTwoPi / resolution;
  auto integrand = [&](double x) { return transform(w(x)); };
  std::vector<double> reps;
  for (double s : w.singular_points) {
    const double r = wrap_period(s);
    reps.insert(reps.end(), {r - kTwoPi, r, r + kTwoPi});
  }
  return parallel_map(static_cast<std::size_t>(resolution), [&](std::size_t i) {
    double a = h * static_cast<double>(i);
    double b = (static_cast<int>(i) + 1 == resolution) ? kTwoPi : h * static_cast<double>(i + 1);
    if (2 * static_cast<int>(i) >= resolution) {
      a -= kTwoPi;
      b = (static_cast<int>(i) + 1 == resolution) ? 0.0 : b - kTwoPi;
    }
    const double snap = 1e-12;
    std::vector<double> local;
    for (double s : reps)
      if (s >= a - snap && s <= b + snap) local.push_back(std::clamp(s, a, b));
    QuadratureOptions opts;
    opts.initial_panels = 1;
    long evals = 0;
    double coarse = 0.0;
    if (local.empty()) {
      coarse = std::fabs(detail::gl_panel(integrand, a, b, evals));
    } else {
      // Magnitude probe away from the singular points.
      const double m = 0.5 * (a + b);
      coarse = std::fabs(integrand(m)) * (b - a);
    }
    const double tol = std::max(rel_tol * coarse, std::numeric_limits<double>::min());
    return integrate_split(integrand, Interval(a, b), local, tol, opts).value;
  });
}

/// sup over the grid interval family of ratio(sum_a/len, sum_b/len).
template <class Ratio>
double interval_family_sup(const std::vector<double>& cells_a, const std::vector<double>& cells_b,
                           int max_periods, Ratio ratio) {
  const int R = static_cast<int>(cells_a.size());
  const int span = R * max_periods;
  const double h = kTwoPi / R;
  std::vector<double> pa(static_cast<std::size_t>(R + span + 1), 0.0), pb(pa.size(), 0.0);
  for (int i = 0; i < R + span; ++i) {
    pa[i + 1] = pa[i] + cells_a[i % R];
    pb[i + 1] = pb[i] + cells_b[i % R];
  }
  const auto per_start = parallel_map(static_cast<std::size_t>(R), [&](std::size_t i) {
    double best = 0.0;
    for (int k = 1; k <= span; ++k) {
      const double len = h * k;
      const double avg_a = (pa[i + k] - pa[i]) / len;
      const double avg_b = (pb[i + k] - pb[i]) / len;
      best = std::max(best, ratio(avg_a, avg_b));
    }
    return best;
  });
  return *std::max_element(per_start.begin(), per_start.end());
}

struct WeightReport {
  std::string descriptor;
  double p = 2.0;
  double ap_constant = std::numeric_limits<double>::quiet_NaN();
  double refined_constant = std::numeric_limits<double>::quiet_NaN();  // at 2 x resolution
  bool in_ap = false;
  std::optional<double> inclusion_q;
  std::optional<double> rh_delta;
  std::optional<double> rh_constant;
  int resolution = 0;
};

namespace detail {

inline double ap_scan(const Weight& w, double p, int resolution, int max_periods) {
  const double dual_exp = -1.0 / (p - 1.0);
  const auto a = weight_cell_integrals(w, [](double v) { return v; }, resolution);
  const auto b = weight_cell_integrals(w, [dual_exp](double v) { return std::pow(v, dual_exp); }, resolution);
  return interval_family_sup(a, b, max_periods,
                             [p](double avg, double avg_dual) { return avg * std::pow(avg_dual, p - 1.0); });
}

}  // namespace detail

/// Estimates [nu]_p over intervals with endpoints on a uniform grid of
/// `resolution` points per period and lengths up to `max_periods` periods.
/// Membership is decided by growth below 10% when the resolution doubles.
/// Throws NotIntegrable when nu or nu^(-1/(p-1)) is not integrable.
inline WeightReport muckenhoupt_constant(const Weight& w, double p, int resolution, int max_periods = 1) {
  if (!(p > 1.0) || !std::isfinite(p)) throw BadArgument("p must lie in (1, inf)");
  if (resolution < 8) throw BadArgument("resolution must be >= 8");
  if (max_periods < 1) throw BadArgument("max_periods must be >= 1");
  WeightReport r;
  r.descriptor = w.descriptor;
  r.p = p;
  r.resolution = resolution;
  r.ap_constant = detail::ap_scan(w, p, resolution, max_periods);
  r.refined_constant = detail::ap_scan(w, p, 2 * resolution, max_periods);
  r.in_ap = std::isfinite(r.ap_constant) && std::isfinite(r.refined_constant) &&
            r.refined_constant <= 1.1 * r.ap_constant;
  return r;
}

struct ReverseHolderResult {
  bool found = false;  // false corresponds to ProbeFailed
  double delta = 0.0;
  double constant = std::numeric_limits<double>::infinity();
};

/// Largest delta on the ladder 1, 1/2, ..., 2^-10 for which
/// (avg nu^(1+delta))^(1/(1+delta)) <= C avg nu holds over the interval family
/// with a C that is stable under resolution doubling.
inline ReverseHolderResult reverse_holder_probe(const Weight& w, double p, int resolution) {
  const WeightReport ap = muckenhoupt_constant(w, p, resolution);
  if (!ap.in_ap) throw BadArgument("reverse Hoelder probe requires a weight in A_p");
  const auto base = weight_cell_integrals(w, [](double v) { return v; }, resolution);
  const auto base_fine = weight_cell_integrals(w, [](double v) { return v; }, 2 * resolution);
  ReverseHolderResult out;
  for (int k = 0; k <= 10; ++k) {
    const double delta = std::ldexp(1.0, -k);
    const double e = 1.0 + delta;
    auto ratio = [e](double avg, double avg_pow) { return std::pow(avg_pow, 1.0 / e) / avg; };
    try {
      const auto hi = weight_cell_integrals(w, [e](double v) { return std::pow(v, e); }, resolution);
      const auto hi_fine = weight_cell_integrals(w, [e](double v) { return std::pow(v, e); }, 2 * resolution);
      const double c = interval_family_sup(base, hi, 1, ratio);
      const double c_fine = interval_family_sup(base_fine, hi_fine, 1, ratio);
      if (std::isfinite(c) && std::isfinite(c_fine) && c_fine <= 1.1 * c) {
        out.found = true;
        out.delta = delta;
        out.constant = c;
        return out;
      }
    } catch (const NotIntegrable&) {
    } catch (const NonFinite&) {
    }
  }
  return out;
}

/// Smallest q on the grid p - k (p-1)/16, k = 1..15, reached by stepping
/// down from p while the weight stays in A_q.
inline std::optional<double> inclusion_search(const Weight& w, double p, int resolution) {
  std::optional<double> best;
  for (int k = 1; k < 16; ++k) {
    const double q = p - k * (p - 1.0) / 16.0;
    try {
      if (!muckenhoupt_constant(w, q, resolution).in_ap) break;
      best = q;
    } catch (const NotIntegrable&) {
      break;
    } catch (const NonFinite&) {
      break;
    }
  }
  return best;
}

/// Full analysis: constant, membership, inclusion exponent, reverse Hoelder.
inline WeightReport analyze_weight(const Weight& w, double p, int resolution) {
  WeightReport r = muckenhoupt_constant(w, p, resolution);
  if (!r.in_ap) return r;
  r.inclusion_q = inclusion_search(w, p, resolution);
  const ReverseHolderResult rh = reverse_holder_probe(w, p, resolution);
  if (rh.found) {
    r.rh_delta = rh.delta;
    r.rh_constant = rh.constant;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Weighted norms

inline constexpr double kDefaultNormTol = 1e-10;

template <class F>
double weighted_lp_norm_J(const F& f, const Weight& w, double p, double tol = kDefaultNormTol,
                          QuadratureOptions opts = {.max_depth = 40, .initial_panels = 16}) {
  if (!(p > 1.0) || !std::isfinite(p)) throw BadArgument("p must lie in (1, inf)");
  const auto sing = w.singular_points_on_J();
  auto integrand = [&](double x) { return std::pow(std::fabs(f(x)), p) * w(x); };
  const double v = integrate_split(integrand, Interval(0.0, kTwoPi), sing, tol, opts).value;
  return std::pow(std::max(v, 0.0), 1.0 / p);
}

inline double weighted_w1p_norm_J(const ScalarFunction1D& f, const Weight& w, double p,
                                  double tol = kDefaultNormTol) {
  if (!f.has_d1()) throw MissingDerivative("W^{1,p} norm needs the first derivative of '" + f.name + "'");
  return weighted_lp_norm_J(f.value, w, p, tol) + weighted_lp_norm_J(f.d1, w, p, tol);
}

inline double l1_norm_J(const ScalarFunction1D& f, double tol = kDefaultNormTol) {
  auto integrand = [&](double x) { return std::fabs(f(x)); };
  return integrate(integrand, Interval(0.0, kTwoPi), tol, {.max_depth = 40, .initial_panels = 16}).value;
}

/// Right-hand side of the L^p_nu(J) -> L^1(J) embedding bound,
/// 2pi [nu]_p^(1/p) ||nu||_1^(-1/p) ||f||_{L^p_nu}.
inline double l1_embedding_bound(const ScalarFunction1D& f, const Weight& w, double p, double ap_constant) {
  const auto sing = w.singular_points_on_J();
  const double nu_l1 = integrate_split([&](double x) { return w(x); }, Interval(0.0, kTwoPi), sing, 1e-12).value;
  return kTwoPi * std::pow(ap_constant, 1.0 / p) * std::pow(nu_l1, -1.0 / p) * weighted_lp_norm_J(f.value, w, p);
}

enum class NormKind { Lp_J, W1p_J, mixed_Pi, pure_Pi, W1p_Pi_mixed, W2p_Pi_mixed };

inline const char* to_string(NormKind k) {
  switch (k) {
    case NormKind::Lp_J: return "Lp_J";
    case NormKind::W1p_J: return "W1p_J";
    case NormKind::mixed_Pi: return "mixed_Pi";
    case NormKind::pure_Pi: return "pure_Pi";
    case NormKind::W1p_Pi_mixed: return "W1p_Pi_mixed";
    case NormKind::W2p_Pi_mixed: return "W2p_Pi_mixed";
  }
  return "?";
}

struct WeightedNormSpec {
  double p = 2.0;
  Weight weight;
  NormKind kind = NormKind::mixed_Pi;
};

/// Norm of a field on the truncated strip (0, 2pi) x (0, xi).
/// mixed_Pi is int_0^xi (int_J |u|^p nu dx)^(1/p) dy; pure_Pi is
/// (iint |u|^p nu dx dy)^(1/p); the W-kinds sum the mixed norms of all
/// derivatives up to their order (u_xy included for order two).
inline double strip_norm(const StripField& field, const WeightedNormSpec& spec, double xi,
                         double tol = 1e-8, int x_panels = 16) {
  const double p = spec.p;
  if (!(p > 1.0) || !std::isfinite(p)) throw BadArgument("p must lie in (1, inf)");
  if (!(xi > 0.0) || !std::isfinite(xi)) throw BadArgument("xi must be positive");
  int components = 1;
  bool pure = false;
  switch (spec.kind) {
    case NormKind::mixed_Pi: break;
    case NormKind::pure_Pi: pure = true; break;
    case NormKind::W1p_Pi_mixed: components = 3; break;
    case NormKind::W2p_Pi_mixed: components = 6; break;
    default: throw BadArgument(std::string("strip_norm does not handle kind ") + to_string(spec.kind));
  }
  const int needed_order = components == 1 ? 0 : (components == 3 ? 1 : 2);
  if (field.order < needed_order)
    throw MissingDerivative("field '" + field.name + "' lacks derivatives for " + to_string(spec.kind));

  using Arr = std::array<double, 6>;
  const auto sing = spec.weight.singular_points_on_J();
  const QuadratureOptions x_opts{.max_depth = 40, .initial_panels = x_panels};
  auto inner = [&](double y) {
    auto integrand = [&](double x) {
      const FieldValues v = field(x, y);
      const double nu = spec.weight(x);
      const Arr c{v.u, v.ux, v.uy, v.uxx, v.uxy, v.uyy};
      Arr out{};
      for (int i = 0; i < components; ++i) out[i] = std::pow(std::fabs(c[i]), p) * nu;
      return out;
    };
    Arr vals = integrate_split(integrand, Interval(0.0, kTwoPi), sing, 0.1 * tol, x_opts).value;
    if (!pure)
      for (int i = 0; i < components; ++i) vals[i] = std::pow(std::max(vals[i], 0.0), 1.0 / p);
    return vals;
  };
  const Arr outer = integrate(inner, Interval(0.0, xi), tol, {.max_depth = 30, .initial_panels = 4}).value;
  double total = 0.0;
  for (int i = 0; i < components; ++i)
    total += pure ? std::pow(std::max(outer[i], 0.0), 1.0 / p) : outer[i];
  return total;
}

}  // namespace striph
