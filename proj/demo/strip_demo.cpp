// Solves the strip problem for f(x) = x sin x and prints a few field values
// next to the closed form (x sin x + y cos x) e^{-y}.

#include <cmath>
#include <cstdio>

#include "striph/striph.hpp"

int main() {
  using namespace striph;
  const BoundaryDatum f = f_preset("xsinx");
  const StripSolution sol = solve(f, 16, 1.0);
  std::printf("%8s %8s %22s %22s\n", "x", "y", "series", "closed form");
  for (double y : {0.0, 0.5, 2.0})
    for (double x : {0.5, kPi, 5.0}) {
      const double exact = (x * std::sin(x) + y * std::cos(x)) * std::exp(-y);
      std::printf("%8.3f %8.3f %22.15e %22.15e\n", x, y, eval_u(sol, x, y), exact);
    }
  const Grid2D grid = make_uniform_grid2d(33, 33, 4.0, 1e-3);
  const LaplacianResidual lap = laplacian_residual(sol, grid, LaplacianMode::analytic);
  std::printf("max |Laplacian| on %s: %.3e\n", grid.describe().c_str(), lap.max_res);
  return 0;
}
