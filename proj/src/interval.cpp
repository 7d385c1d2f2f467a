#include "skewlab/interval.hpp"

#include <stdexcept>
#include <string>

namespace skewlab {

double t_alpha_left_inverse(double y, double alpha) {
  if (!(y > 0.0 && y <= 1.0)) {
    throw std::domain_error("t_alpha_left_inverse: y=" + std::to_string(y) +
                            " outside (0,1]");
  }
  if (y == 1.0) return 0.5;
  // g(x) = x (1 + (2x)^a) - y is increasing and convex on (0, 1/2]. Since the
  // root x satisfies x = y / (1 + (2x)^a) and x < y, the value
  // lo = y / (1 + (2y)^a) is below it and hi = y / (1 + (2 lo)^a) above it.
  // Newton started from hi stays in [root, hi] by convexity; a bisection step
  // replaces any iterate that leaves the bracket.
  double lo = y / (1.0 + std::pow(2.0 * y, alpha));
  double hi = std::min(0.5, y / (1.0 + std::pow(2.0 * lo, alpha)));
  double x = hi;
  for (int iter = 0; iter < 100; ++iter) {
    const double p = std::exp(alpha * std::log(2.0 * x));
    const double g = x * (1.0 + p) - y;
    if (g > 0.0) {
      hi = x;
    } else if (g < 0.0) {
      lo = x;
    } else {
      return x;
    }
    const double dg = 1.0 + (alpha + 1.0) * p;
    double next = x - g / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * x) return next;
    x = next;
  }
  return x;
}

}  // namespace skewlab
