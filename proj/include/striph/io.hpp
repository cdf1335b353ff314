#pragma once

// Presets, CSV ingestion (sampled data and weights), JSON/CSV export and
// atomic file writes.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "striph/basis.hpp"
#include "striph/errors.hpp"
#include "striph/quadrature.hpp"
#include "striph/solver.hpp"
#include "striph/verification.hpp"
#include "striph/weights.hpp"

namespace striph {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Boundary data presets

/// "xsinx", "sinx" or "poly" (x (2pi - x)(pi - x)).
inline BoundaryDatum f_preset(const std::string& name) {
  BoundaryDatum d;
  ScalarFunction1D& f = d.f;
  f.smoothness = Smoothness::c_inf;
  f.name = name;
  if (name == "xsinx") {
    f.value = [](double x) { return x * std::sin(x); };
    f.d1 = [](double x) { return std::sin(x) + x * std::cos(x); };
    f.d2 = [](double x) { return 2.0 * std::cos(x) - x * std::sin(x); };
  } else if (name == "sinx") {
    f.value = [](double x) { return std::sin(x); };
    f.d1 = [](double x) { return std::cos(x); };
    f.d2 = [](double x) { return -std::sin(x); };
  } else if (name == "poly") {
    // x^3 - 3pi x^2 + 2pi^2 x
    f.value = [](double x) { return x * (kTwoPi - x) * (kPi - x); };
    f.d1 = [](double x) { return 3.0 * x * x - 6.0 * kPi * x + 2.0 * kPi * kPi; };
    f.d2 = [](double x) { return 6.0 * x - 6.0 * kPi; };
  } else {
    throw UnknownPreset("unknown datum preset '" + name + "' (expected xsinx, sinx, poly)");
  }
  return d;
}

inline std::vector<std::string> f_preset_names() { return {"xsinx", "sinx", "poly"}; }

// ---------------------------------------------------------------------------
// Number formatting and files

/// 17 significant digits, lowercase exponent.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes through a sibling temporary and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw BadArgument("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw BadArgument("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw BadArgument("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BadArgument("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_number(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw MalformedCSV("line " + std::to_string(line_no) + ": '" + std::string(tok) + "' is not a finite number");
  return v;
}

}  // namespace detail

/// Columns of a numeric CSV whose header must equal `header` exactly.
inline std::vector<std::vector<double>> parse_csv(const std::string& text, const std::vector<std::string>& header) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<std::vector<double>> cols(header.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto toks = detail::split(line);
    if (!have_header) {
      if (toks.size() != header.size())
        throw MalformedCSV("header must have " + std::to_string(header.size()) + " columns");
      for (std::size_t i = 0; i < header.size(); ++i)
        if (toks[i] != header[i]) throw MalformedCSV("header column " + std::to_string(i + 1) + " must be '" + header[i] + "'");
      have_header = true;
      continue;
    }
    if (toks.size() != header.size())
      throw MalformedCSV("line " + std::to_string(line_no) + " has " + std::to_string(toks.size()) + " fields");
    for (std::size_t i = 0; i < header.size(); ++i) cols[i].push_back(detail::parse_number(toks[i], line_no));
  }
  if (!have_header) throw MalformedCSV("empty file");
  if (cols[0].empty()) throw MalformedCSV("no data rows");
  return cols;
}

/// Cubic spline through (xs, ys) with end slopes fixed, plus its first two derivatives.
class ClampedSpline {
 public:
  ClampedSpline(std::vector<double> xs, std::vector<double> ys, double slope_a, double slope_b)
      : x_(std::move(xs)), y_(std::move(ys)), m_(x_.size(), 0.0) {
    const std::size_t n = x_.size();
    // Second-derivative moments from the tridiagonal system (Thomas algorithm).
    std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
    const double h0 = x_[1] - x_[0], hn = x_[n - 1] - x_[n - 2];
    diag[0] = h0 / 3.0;
    sup[0] = h0 / 6.0;
    rhs[0] = (y_[1] - y_[0]) / h0 - slope_a;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
      sub[i] = hl / 6.0;
      diag[i] = (hl + hr) / 3.0;
      sup[i] = hr / 6.0;
      rhs[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
    }
    sub[n - 1] = hn / 6.0;
    diag[n - 1] = hn / 3.0;
    rhs[n - 1] = slope_b - (y_[n - 1] - y_[n - 2]) / hn;
    for (std::size_t i = 1; i < n; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m_[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
  }

  double value(double x) const { return eval(x, 0); }
  double d1(double x) const { return eval(x, 1); }
  double d2(double x) const { return eval(x, 2); }

 private:
  double eval(double x, int order) const {
    const std::size_t n = x_.size();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
    i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
    switch (order) {
      case 0:
        return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
      case 1:
        return (y_[i + 1] - y_[i]) / h - (3.0 * a * a - 1.0) * h / 6.0 * m_[i] + (3.0 * b * b - 1.0) * h / 6.0 * m_[i + 1];
      default:
        return a * m_[i] + b * m_[i + 1];
    }
  }

  std::vector<double> x_, y_, m_;
};

namespace detail {

// Fourth-order one-sided slope at the start of (xs, ys), Lagrange on 5 points.
inline double one_sided_slope(const double* xs, const double* ys, int count) {
  double slope = 0.0;
  const double x0 = xs[0];
  for (int j = 0; j < count; ++j) {
    // d/dx L_j(x) at x0
    double dl = 0.0;
    for (int k = 0; k < count; ++k) {
      if (k == j) continue;
      double term = 1.0 / (xs[j] - xs[k]);
      for (int m = 0; m < count; ++m)
        if (m != j && m != k) term *= (x0 - xs[m]) / (xs[j] - xs[m]);
      dl += term;
    }
    slope += ys[j] * dl;
  }
  return slope;
}

}  // namespace detail

inline ScalarFunction1D sampled_function(std::vector<double> xs, std::vector<double> ys, std::string name) {
  if (xs.size() != ys.size() || xs.size() < 2) throw MalformedCSV("need at least two samples");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw NonMonotoneAbscissae("abscissae must be strictly increasing (row " + std::to_string(i + 1) + ")");
  if (xs.front() < -1e-12 || xs.back() > kTwoPi + 1e-12) throw MalformedCSV("abscissae must lie in [0, 2pi]");
  const int k = static_cast<int>(std::min<std::size_t>(5, xs.size()));
  const double sa = detail::one_sided_slope(xs.data(), ys.data(), k);
  std::vector<double> rx(xs.rbegin(), xs.rbegin() + k), ry(ys.rbegin(), ys.rbegin() + k);
  const double sb = detail::one_sided_slope(rx.data(), ry.data(), k);
  auto spline = std::make_shared<const ClampedSpline>(std::move(xs), std::move(ys), sa, sb);
  ScalarFunction1D f;
  f.value = [spline](double x) { return spline->value(x); };
  f.d1 = [spline](double x) { return spline->d1(x); };
  f.d2 = [spline](double x) { return spline->d2(x); };
  f.smoothness = Smoothness::c2;
  f.name = std::move(name);
  return f;
}

/// CSV with header `x,value`, x strictly increasing in [0, 2pi].
inline ScalarFunction1D load_sampled_function(const std::filesystem::path& path) {
  const auto cols = parse_csv(read_file(path), {"x", "value"});
  return sampled_function(cols[0], cols[1], path.filename().string());
}

/// CSV with header `x,nu`, samples of one period.
inline Weight load_weight_csv(const std::filesystem::path& path) {
  const auto cols = parse_csv(read_file(path), {"x", "nu"});
  return weight_from_samples(cols[0], cols[1], path.filename().string());
}

inline bool looks_like_path(const std::string& spec) {
  return spec.find('/') != std::string::npos || spec.ends_with(".csv") || std::filesystem::exists(spec);
}

inline BoundaryDatum resolve_datum(const std::string& spec) {
  if (looks_like_path(spec)) return BoundaryDatum{load_sampled_function(spec), std::nullopt};
  return f_preset(spec);
}

inline Weight resolve_weight(const std::string& spec) {
  if (looks_like_path(spec)) return load_weight_csv(spec);
  return weight_from_preset(spec);
}

// ---------------------------------------------------------------------------
// JSON

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json to_json(const BiorthoSpectrum& s) {
  return Json{{"N", s.N}, {"a0c", s.a0c}, {"ac", s.ac}, {"as", s.as}, {"source", s.source}};
}

inline Json to_json(const StripSolution& sol) {
  Json j = to_json(sol.spectrum);
  j["lambda"] = sol.lambda;
  j["f"] = sol.f_ref;
  return j;
}

/// Inverse of to_json(StripSolution); the datum itself is not stored.
inline StripSolution solution_from_json(const Json& j) {
  try {
    StripSolution sol;
    sol.spectrum.N = j.at("N").get<int>();
    sol.spectrum.a0c = j.at("a0c").get<double>();
    sol.spectrum.ac = j.at("ac").get<std::vector<double>>();
    sol.spectrum.as = j.at("as").get<std::vector<double>>();
    sol.spectrum.source = j.value("source", std::string{});
    sol.spectrum.validate();
    sol.N = sol.spectrum.N;
    sol.lambda = j.at("lambda").get<double>();
    sol.f_ref = j.value("f", sol.spectrum.source);
    return sol;
  } catch (const nlohmann::json::exception& e) {
    throw BadArgument(std::string("malformed solution JSON: ") + e.what());
  }
}

inline StripSolution load_solution_json(const std::filesystem::path& path) {
  try {
    return solution_from_json(Json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw BadArgument(std::string("malformed solution JSON: ") + e.what());
  }
}

inline Json to_json(const WeightReport& r) {
  return Json{{"weight", r.descriptor},
              {"p", r.p},
              {"ap_constant", r.ap_constant},
              {"refined_constant", r.refined_constant},
              {"in_ap", r.in_ap},
              {"inclusion_q", optional_json(r.inclusion_q)},
              {"rh_delta", optional_json(r.rh_delta)},
              {"rh_constant", optional_json(r.rh_constant)},
              {"resolution", r.resolution}};
}

inline Json to_json(const ResidualReport& r) {
  Json decay = Json::array();
  for (const auto& s : r.trace_decay) decay.push_back({{"y", s.y}, {"error", s.error}});
  Json weak = Json::array();
  for (std::size_t i = 0; i < r.weak_residuals.size(); ++i)
    weak.push_back({{"test", i < r.weak_tests.size() ? r.weak_tests[i] : std::string{}}, {"residual", r.weak_residuals[i]}});
  return Json{{"laplacian_max", r.laplacian_max},
              {"laplacian_order", r.laplacian_order},
              {"fd_laplacian_max", r.fd_laplacian_max},
              {"weak_residuals", weak},
              {"ux_at_0_max", r.ux_at_0_max},
              {"periodicity_max", r.periodicity_max},
              {"trace_error", r.trace_error},
              {"trace_error_ymin", r.trace_error_ymin},
              {"trace_decay", decay},
              {"norm_ratio", optional_json(r.norm_ratio)},
              {"w2_xi", r.w2_xis},
              {"w2_norms", r.w2_norms},
              {"w2_stable", r.w2_stable},
              {"harmonic", r.harmonic},
              {"tail_estimate", r.tail},
              {"lambda_used", r.lambda_used},
              {"N", r.N},
              {"grid", r.grid},
              {"provenance",
               {{"f", r.f_name},
                {"weight", r.weight_name},
                {"p", r.p},
                {"xi", r.xi},
                {"N", r.N},
                {"lambda", r.lambda_used},
                {"grid", r.grid},
                {"weak_tol", r.weak_tol},
                {"norm_tol", r.norm_tol}}}};
}

/// Pretty-printed with a trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV export

inline std::string field_csv(const StripSolution& sol, const Grid2D& g) {
  const std::size_t nx = g.x_grid.size(), ny = g.y_grid.size();
  const auto rows = parallel_map(ny, [&](std::size_t j) {
    std::string block;
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = g.x_grid[i], y = g.y_grid[j];
      const FieldValues v = eval_all(sol, x, y);
      for (double c : {x, y, v.u, v.ux, v.uy, v.uxx}) {
        block += format_double(c);
        block += ',';
      }
      block += format_double(v.uyy);
      block += '\n';
    }
    return block;
  });
  std::string out = "x,y,u,ux,uy,uxx,uyy\n";
  for (const auto& r : rows) out += r;
  return out;
}

inline std::string gram_csv(const DenseMatrix& g) {
  std::string out = "row";
  for (int j = 0; j < g.cols; ++j) out += "," + basis_index_at(j).label();
  out += '\n';
  for (int i = 0; i < g.rows; ++i) {
    out += basis_index_at(i).label();
    for (int j = 0; j < g.cols; ++j) out += "," + format_double(g(i, j));
    out += '\n';
  }
  return out;
}

}  // namespace striph
