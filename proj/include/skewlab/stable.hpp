#pragma once

// Stable laws in the parameterization
//   E exp(itZ) = exp(-c |t|^p (1 - i beta sgn(t) tan(p pi / 2))),
// with index p in (1, 2], scale c > 0 and skewness beta in [-1, 1]. Every
// conversion to other conventions lives in stable.cpp.

#include <complex>
#include <stdexcept>
#include <vector>

#include "skewlab/circle.hpp"
#include "skewlab/rng.hpp"

namespace skewlab {

struct StableLaw {
  double p = 2.0;
  double scale = 1.0;
  double beta = 0.0;

  /// Throws std::invalid_argument unless p in (1,2], scale > 0, |beta| <= 1.
  void validate() const;
};

std::complex<double> stable_cf(const StableLaw& law, double t);

/// CDF by Gil-Pelaez inversion, truncated where exp(-c t^p) < 1e-12.
/// Absolute error <= 1e-6; throws QuadratureError otherwise.
double stable_cdf(const StableLaw& law, double x);

/// One draw by the Chambers-Mallows-Stuck transform.
double stable_sample(const StableLaw& law, Engine& rng);

/// CDF from the leading power-law tail term; accurate only for large |x|.
double stable_tail_cdf(const StableLaw& law, double x);

/// CDF table for evaluating many points: linear interpolation on a uniform
/// grid over [lo, hi] continued by geometrically spaced tail nodes out to ten
/// core widths, and the power-law tail beyond the last node.
class StableCdfTable {
 public:
  StableCdfTable(StableLaw law, double lo, double hi, double step);
  double operator()(double x) const;
  const StableLaw& law() const noexcept { return law_; }

 private:
  StableLaw law_;
  std::vector<double> nodes_;
  std::vector<double> values_;
};

/// Gamma at any non-integer argument; negative arguments go through the
/// reflection formula Gamma(z) = pi / (sin(pi z) Gamma(1 - z)).
double gamma_fn(double z);

/// Limit law of S_n f / (n^a sqrt(a ln n)) for 1/2 < a = alpha_min < 1 and
/// c = integral of f along the neutral curve:
///   p = 1/a, scale = A |c|^{1/a} Gamma(1 - 1/a) cos(pi / (2a)), beta = sgn c.
/// Throws std::invalid_argument outside that range or for c == 0, and
/// std::logic_error if the computed scale is not positive.
StableLaw theorem_params(const ParamCurve& curve, double a_const,
                         double c_obs);

}  // namespace skewlab
