#pragma once

#include <functional>
#include <string>

namespace striph {

/// Point values of a field on the strip and its derivatives up to order two.
struct FieldValues {
  double u = 0.0;
  double ux = 0.0;
  double uy = 0.0;
  double uxx = 0.0;
  double uxy = 0.0;
  double uyy = 0.0;
};

/// An evaluable field on the strip. `order` is the highest derivative order
/// the evaluator fills in; entries above it are meaningless.
struct StripField {
  std::function<FieldValues(double x, double y)> eval;
  int order = 0;
  std::string name;

  FieldValues operator()(double x, double y) const { return eval(x, y); }
};

}  // namespace striph
