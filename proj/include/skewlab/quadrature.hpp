#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace skewlab {

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error " +
                           std::to_string(achieved) + ")"),
        achieved_(achieved) {}
  double achieved_error() const noexcept { return achieved_; }

 private:
  double achieved_;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (15-point Gauss-Legendre rule with its Kronrod
/// extension) on [a, b]. Does not throw; callers check `error`.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double abs_tol, int max_depth = 30);

/// Integral over [a, b] with panels refined dyadically toward `peak`
/// (peak in [a, b]). Panel widths halve down to `min_width` next to the peak.
QuadratureResult integrate_toward(const std::function<double(double)>& f,
                                  double a, double b, double peak,
                                  double abs_tol, double min_width = 1e-12);

}  // namespace skewlab
