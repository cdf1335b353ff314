#pragma once

// The primal system {1, cos nx, x sin nx} on J, its biorthonormal dual
// {(2pi-x)/(2pi^2), (2pi-x) cos nx / pi^2, sin nx / pi^2}, expansion
// coefficients, partial-sum projectors and the classical Fourier side.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "striph/errors.hpp"
#include "striph/parallel.hpp"
#include "striph/quadrature.hpp"
#include "striph/weights.hpp"

namespace striph {

enum class BasisKind { C, S };

struct BasisIndex {
  BasisKind kind = BasisKind::C;
  int n = 0;

  void validate() const {
    if (n < 0) throw InvalidIndex("basis index must be nonnegative");
    if (kind == BasisKind::S && n == 0) throw InvalidIndex("(S, 0) is not a basis element");
  }
  std::string label() const { return std::string(kind == BasisKind::C ? "C" : "S") + std::to_string(n); }
};

inline constexpr double kPiSq = kPi * kPi;

inline double eval_primal(BasisIndex idx, double x) {
  idx.validate();
  if (idx.kind == BasisKind::C) return idx.n == 0 ? 1.0 : std::cos(idx.n * x);
  return x * std::sin(idx.n * x);
}

inline double eval_dual(BasisIndex idx, double x) {
  idx.validate();
  if (idx.kind == BasisKind::C) {
    if (idx.n == 0) return (kTwoPi - x) / (2.0 * kPiSq);
    return (kTwoPi - x) * std::cos(idx.n * x) / kPiSq;
  }
  return std::sin(idx.n * x) / kPiSq;
}

/// Ordering (C,0), (C,1), (S,1), (C,2), (S,2), ... used by Gram matrices.
inline BasisIndex basis_index_at(int i) {
  if (i == 0) return {BasisKind::C, 0};
  const int n = (i + 1) / 2;
  return {(i % 2 == 1) ? BasisKind::C : BasisKind::S, n};
}

/// Quadrature panels that resolve a product oscillating at frequency n.
inline int panels_for_frequency(int n) { return 8 + 2 * n; }

struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }

  double max_deviation_from_identity() const {
    double m = 0.0;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m = std::max(m, std::fabs((*this)(i, j) - (i == j ? 1.0 : 0.0)));
    return m;
  }
};

/// G(i, j) = (primal_i ; dual_j) for the 2N+1 leading elements.
inline DenseMatrix biortho_gram(int N, double tol = 1e-10) {
  if (N < 1) throw BadArgument("Gram matrix needs N >= 1");
  const int dim = 2 * N + 1;
  DenseMatrix g{dim, dim, std::vector<double>(static_cast<std::size_t>(dim) * dim)};
  const auto rows = parallel_map(static_cast<std::size_t>(dim), [&](std::size_t i) {
    const BasisIndex pi = basis_index_at(static_cast<int>(i));
    std::vector<double> row(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
      const BasisIndex dj = basis_index_at(j);
      auto integrand = [&](double x) { return eval_primal(pi, x) * eval_dual(dj, x); };
      const QuadratureOptions opts{.max_depth = 40, .initial_panels = panels_for_frequency(pi.n + dj.n)};
      row[static_cast<std::size_t>(j)] = integrate(integrand, Interval(0.0, kTwoPi), tol, opts).value;
    }
    return row;
  });
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return g;
}

/// Biorthonormal coefficients (theta_0^c; f), (theta_n^c; f), (theta_n^s; f), n = 1..N.
struct BiorthoSpectrum {
  int N = 0;
  double a0c = 0.0;
  std::vector<double> ac;  // ac[n-1]
  std::vector<double> as;  // as[n-1]
  std::string source;

  double cos_coef(int n) const { return n == 0 ? a0c : ac[static_cast<std::size_t>(n - 1)]; }
  double sin_coef(int n) const { return as[static_cast<std::size_t>(n - 1)]; }

  void validate() const {
    if (N < 0 || ac.size() != static_cast<std::size_t>(N) || as.size() != static_cast<std::size_t>(N))
      throw BadArgument("spectrum lists must have length N");
    if (!std::isfinite(a0c)) throw NonFinite("spectrum entry a0c is not finite");
    for (std::size_t i = 0; i < ac.size(); ++i)
      if (!std::isfinite(ac[i]) || !std::isfinite(as[i])) throw NonFinite("spectrum entry is not finite");
  }
};

inline constexpr double kDefaultCoefficientTol = 1e-12;

namespace detail {

// Coefficient tolerances are relative to 2pi ||f||_{L^1(J)} once that exceeds
// one: cos(nx) at large n carries argument rounding proportional to |f|.
template <class F>
double coefficient_tol(const F& f, double tol) {
  const double mass =
      integrate([&](double x) { return std::fabs(f(x)); }, Interval(0.0, kTwoPi), 1e-6, {.max_depth = 12, .initial_panels = 16})
          .value;
  return tol * std::max(1.0, kTwoPi * mass);
}

}  // namespace detail

template <class F>
BiorthoSpectrum biortho_coefficients(const F& f, int N, double tol = kDefaultCoefficientTol,
                                     std::string source = {}) {
  if (N < 1) throw BadArgument("biorthonormal expansion needs N >= 1");
  BiorthoSpectrum s;
  s.N = N;
  s.source = std::move(source);
  const Interval J(0.0, kTwoPi);
  tol = detail::coefficient_tol(f, tol);
  s.a0c = integrate([&](double x) { return f(x) * (kTwoPi - x); }, J, tol, {.max_depth = 40, .initial_panels = 8}).value /
          (2.0 * kPiSq);
  const auto pairs = parallel_map(static_cast<std::size_t>(N), [&](std::size_t i) {
    const int n = static_cast<int>(i) + 1;
    const QuadratureOptions opts{.max_depth = 40, .initial_panels = panels_for_frequency(n)};
    const double c = integrate([&](double x) { return f(x) * (kTwoPi - x) * std::cos(n * x); }, J, tol, opts).value;
    const double sn = integrate([&](double x) { return f(x) * std::sin(n * x); }, J, tol, opts).value;
    return std::pair{c / kPiSq, sn / kPiSq};
  });
  s.ac.resize(static_cast<std::size_t>(N));
  s.as.resize(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    s.ac[static_cast<std::size_t>(i)] = pairs[static_cast<std::size_t>(i)].first;
    s.as[static_cast<std::size_t>(i)] = pairs[static_cast<std::size_t>(i)].second;
  }
  return s;
}

inline BiorthoSpectrum zero_spectrum(int N) {
  BiorthoSpectrum s;
  s.N = N;
  s.ac.assign(static_cast<std::size_t>(N), 0.0);
  s.as.assign(static_cast<std::size_t>(N), 0.0);
  s.source = "zero";
  return s;
}

/// Spectrum truncated (or zero-padded) to N terms.
inline BiorthoSpectrum resized(const BiorthoSpectrum& s, int N) {
  BiorthoSpectrum out = s;
  out.N = N;
  out.ac.resize(static_cast<std::size_t>(N), 0.0);
  out.as.resize(static_cast<std::size_t>(N), 0.0);
  return out;
}

namespace detail {

// a0 + sum_{n<=nc} c_n cos nx + x sum_{n<=ns} s_n sin nx, harmonics by rotation.
inline double biortho_sum(double a0, const double* c, int nc, const double* s, int ns, double x) {
  const int n_max = std::max(nc, ns);
  const double c1 = std::cos(x), s1 = std::sin(x);
  double cn = 1.0, sn = 0.0;
  double total = a0;
  for (int n = 1; n <= n_max; ++n) {
    const double cnext = cn * c1 - sn * s1;
    sn = sn * c1 + cn * s1;
    cn = cnext;
    double term = 0.0;
    if (n <= nc) term += c[n - 1] * cn;
    if (n <= ns) term += s[n - 1] * (x * sn);
    total += term;
  }
  return total;
}

}  // namespace detail

inline double synthesize(const BiorthoSpectrum& s, double x) {
  return detail::biortho_sum(s.a0c, s.ac.data(), s.N, s.as.data(), s.N, x);
}

/// S_{n,m} f: cosine part through index n, x sin part through index m.
struct PartialSum {
  double a0c = 0.0;
  std::vector<double> ac;  // length n
  std::vector<double> as;  // length m

  double operator()(double x) const {
    return detail::biortho_sum(a0c, ac.data(), static_cast<int>(ac.size()), as.data(), static_cast<int>(as.size()), x);
  }
};

inline PartialSum partial_sum(const BiorthoSpectrum& s, int n, int m) {
  if (n < 0 || m < 1) throw BadArgument("projector needs n >= 0 and m >= 1");
  if (n > s.N || m > s.N) throw BadArgument("projector order exceeds the spectrum length");
  PartialSum p;
  p.a0c = s.a0c;
  p.ac.assign(s.ac.begin(), s.ac.begin() + n);
  p.as.assign(s.as.begin(), s.as.begin() + m);
  return p;
}

template <class F>
PartialSum projector_snm(const F& f, int n, int m, double tol = kDefaultCoefficientTol) {
  if (n < 0 || m < 1) throw BadArgument("projector needs n >= 0 and m >= 1");
  return partial_sum(biortho_coefficients(f, std::max({n, m, 1}), tol), n, m);
}

struct ProjectorOrder {
  int n = 0;
  int m = 1;
};

/// For each order, sup over the corpus of ||S_{n,m} f|| / ||f|| in L^p_nu(J).
inline std::vector<double> projector_norm_scan(const std::vector<ScalarFunction1D>& corpus, const Weight& w, double p,
                                               const std::vector<ProjectorOrder>& orders,
                                               double tol = kDefaultCoefficientTol) {
  if (corpus.empty()) throw EmptyCorpus("projector scan needs at least one function");
  int top = 1;
  for (const auto& o : orders) {
    if (o.n < 0 || o.m < 1) throw BadArgument("projector needs n >= 0 and m >= 1");
    top = std::max({top, o.n, o.m});
  }
  std::vector<BiorthoSpectrum> spectra;
  std::vector<double> norms;
  for (const auto& f : corpus) {
    spectra.push_back(biortho_coefficients(f.value, top, tol, f.name));
    norms.push_back(weighted_lp_norm_J(f.value, w, p));
    if (!(norms.back() > 0.0)) throw BadArgument("corpus function '" + f.name + "' has zero norm");
  }
  return parallel_map(orders.size(), [&](std::size_t k) {
    const auto& o = orders[k];
    double sup = 0.0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const PartialSum ps = partial_sum(spectra[i], o.n, o.m);
      const QuadratureOptions opts{.max_depth = 40, .initial_panels = panels_for_frequency(std::max(o.n, o.m))};
      sup = std::max(sup, weighted_lp_norm_J(ps, w, p, kDefaultNormTol, opts) / norms[i]);
    }
    return sup;
  });
}

/// Raw cosine/sine integrals f_n^c (n = 0..N) and f_n^s (n = 1..N).
struct FourierSpectrum {
  std::vector<double> c;
  std::vector<double> s;  // s[n-1]
  int N() const { return static_cast<int>(s.size()); }
};

template <class F>
FourierSpectrum fourier_coefficients(const F& f, int N, double tol = kDefaultCoefficientTol) {
  if (N < 1) throw BadArgument("Fourier spectrum needs N >= 1");
  const Interval J(0.0, kTwoPi);
  tol = detail::coefficient_tol(f, tol);
  const auto pairs = parallel_map(static_cast<std::size_t>(N + 1), [&](std::size_t i) {
    const int n = static_cast<int>(i);
    const QuadratureOptions opts{.max_depth = 40, .initial_panels = panels_for_frequency(n)};
    const double c = integrate([&](double x) { return f(x) * std::cos(n * x); }, J, tol, opts).value;
    const double s = n == 0 ? 0.0 : integrate([&](double x) { return f(x) * std::sin(n * x); }, J, tol, opts).value;
    return std::pair{c, s};
  });
  FourierSpectrum out;
  out.c.resize(static_cast<std::size_t>(N + 1));
  out.s.resize(static_cast<std::size_t>(N));
  for (int n = 0; n <= N; ++n) {
    out.c[static_cast<std::size_t>(n)] = pairs[static_cast<std::size_t>(n)].first;
    if (n > 0) out.s[static_cast<std::size_t>(n - 1)] = pairs[static_cast<std::size_t>(n)].second;
  }
  return out;
}

/// (f_0^c)^2/(2pi) + (1/pi) sum ((f_n^c)^2 + (f_n^s)^2); equals ||f||^2_{L^2(J)}
/// for trigonometric polynomials of degree <= N.
inline double parseval_sum(const FourierSpectrum& fs) {
  double tail = 0.0;
  for (int n = 1; n <= fs.N(); ++n)
    tail += fs.c[static_cast<std::size_t>(n)] * fs.c[static_cast<std::size_t>(n)] +
            fs.s[static_cast<std::size_t>(n - 1)] * fs.s[static_cast<std::size_t>(n - 1)];
  return fs.c[0] * fs.c[0] / kTwoPi + tail / kPi;
}

struct YoungHausdorffResult {
  double lhs = 0.0;       // l^{p'} norm of the raw Fourier coefficients
  double rhs_norm = 0.0;  // ||f||_{L^p(J)}
  std::optional<double> ratio;
};

inline double conjugate_exponent(double p) { return p / (p - 1.0); }

template <class F>
YoungHausdorffResult young_hausdorff_ratio(const F& f, double p, int N, double tol = kDefaultCoefficientTol) {
  if (!(p > 1.0 && p <= 2.0)) throw BadArgument("Young-Hausdorff needs p in (1, 2]");
  const double q = conjugate_exponent(p);
  const FourierSpectrum fs = fourier_coefficients(f, N, tol);
  double acc = std::pow(std::fabs(fs.c[0]), q);
  for (int n = 1; n <= N; ++n)
    acc += std::pow(std::fabs(fs.c[static_cast<std::size_t>(n)]), q) + std::pow(std::fabs(fs.s[static_cast<std::size_t>(n - 1)]), q);
  YoungHausdorffResult r;
  r.lhs = std::pow(acc, 1.0 / q);
  r.rhs_norm = weighted_lp_norm_J(f, weight_one(), p);
  if (r.rhs_norm > 0.0) r.ratio = r.lhs / r.rhs_norm;
  return r;
}

/// Smallest c with |ac[n]|, |as[n]| <= c / n^2 over the computed n.
inline double coeff_decay_bound(const BiorthoSpectrum& s) {
  double c = 0.0;
  for (int n = 1; n <= s.N; ++n) {
    const double n2 = static_cast<double>(n) * n;
    c = std::max({c, n2 * std::fabs(s.ac[static_cast<std::size_t>(n - 1)]), n2 * std::fabs(s.as[static_cast<std::size_t>(n - 1)])});
  }
  return c;
}

}  // namespace striph
