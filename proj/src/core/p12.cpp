#include <cmath>
#include <tuple>

#include "hetlab/analysis.hpp"

namespace hetlab {

// Off-axis equilibria of P12 are the intersections of
//   x2^2 = -(x1 + b11 x1^2 + c1 x1^3) / b12   (cubic branch)
//   x2^2 = -(1 + b21 x1^2 + d2 x1) / b22      (parabola branch)
// located by a sign-change scan of their difference and bisection.
std::vector<P12Equilibrium> p12_interior_equilibria(const CoefficientSet& c,
                                                    const P12Options& opts) {
  if (c.b12 == 0.0) throw Error(ErrorCode::DegenerateCoefficient, "b12 must be nonzero");
  if (c.b22 == 0.0) throw Error(ErrorCode::DegenerateCoefficient, "b22 must be nonzero");
  if (!(opts.half_width > 0.0) || opts.grid_cells == 0 || !(opts.tolerance > 0.0))
    throw Error(ErrorCode::Config, "invalid P12 scan options");

  auto cubic = [&](double x) { return -(x + x * x * (c.b11 + c.c1 * x)) / c.b12; };
  auto parabola = [&](double x) { return -(1.0 + x * (c.d2 + c.b21 * x)) / c.b22; };
  auto diff = [&](double x) { return cubic(x) - parabola(x); };

  double xa = -INFINITY, xb = -INFINITY;
  bool have_d = false;
  try {
    std::tie(xa, xb) = quadratic_roots(c);
    have_d = xa < 0.0 && xb > 0.0;
  } catch (const Error&) {
  }

  std::vector<double> roots;
  const double width = 2.0 * opts.half_width;
  const auto n = opts.grid_cells;
  double left = -opts.half_width;
  double f_left = diff(left);
  for (std::size_t i = 1; i <= n; ++i) {
    const double right = -opts.half_width + width * static_cast<double>(i) / static_cast<double>(n);
    const double f_right = diff(right);
    if (f_left == 0.0) {
      roots.push_back(left);
    } else if ((f_left < 0.0) != (f_right < 0.0) && f_right != 0.0) {
      double lo = left, hi = right, f_lo = f_left;
      while (hi - lo > opts.tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = diff(mid);
        if (f_mid == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
          lo = mid;
          f_lo = f_mid;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    left = right;
    f_left = f_right;
  }
  if (f_left == 0.0) roots.push_back(left);

  std::vector<P12Equilibrium> out;
  for (double x1 : roots) {
    const double x2sq = 0.5 * (cubic(x1) + parabola(x1));
    if (!(x2sq > 0.0)) continue;
    out.push_back({x1, std::sqrt(x2sq), have_d && x1 > xa && x1 < xb});
  }
  return out;
}

}  // namespace hetlab
