#include "skewlab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace skewlab {
namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

QuadratureResult panel(const std::function<double(double)>& f, double a,
                       double b) {
  QuadratureResult r;
  r.value = Rule::integrate(f, a, b, 0, 0.0, &r.error);
  return r;
}

QuadratureResult refine(const std::function<double(double)>& f, double a,
                        double b, double tol, int depth,
                        const QuadratureResult& whole) {
  if (whole.error <= tol || depth <= 0) return whole;
  const double mid = 0.5 * (a + b);
  const auto left = panel(f, a, mid);
  const auto right = panel(f, mid, b);
  const auto l = refine(f, a, mid, 0.5 * tol, depth - 1, left);
  const auto r = refine(f, mid, b, 0.5 * tol, depth - 1, right);
  return {l.value + r.value, l.error + r.error};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double abs_tol, int max_depth) {
  if (a == b) return {};
  return refine(f, a, b, abs_tol, max_depth, panel(f, a, b));
}

QuadratureResult integrate_toward(const std::function<double(double)>& f,
                                  double a, double b, double peak,
                                  double abs_tol, double min_width) {
  QuadratureResult total;
  // Split into [a, peak] and [peak, b]; each side is cut into panels whose
  // widths halve on approach to the peak.
  const auto side = [&](double far, double sign) {
    double width = std::abs(far - peak);
    if (width == 0.0) return;
    std::vector<std::pair<double, double>> panels;
    double outer = far;
    while (width > min_width) {
      const double inner = peak + sign * 0.5 * width;
      panels.emplace_back(std::min(inner, outer), std::max(inner, outer));
      outer = inner;
      width *= 0.5;
    }
    panels.emplace_back(std::min(peak, outer), std::max(peak, outer));
    const double tol = 0.5 * abs_tol / static_cast<double>(panels.size());
    for (const auto& [lo, hi] : panels) {
      const auto r = integrate(f, lo, hi, tol);
      total.value += r.value;
      total.error += r.error;
    }
  };
  side(a, -1.0);
  side(b, 1.0);
  return total;
}

}  // namespace skewlab
