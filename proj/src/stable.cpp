#include "skewlab/stable.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "skewlab/quadrature.hpp"

namespace skewlab {
namespace {

constexpr double kPi = std::numbers::pi;

// tan(p pi / 2) vanishes in the Gaussian case; the floating point value
// tan(pi) ~ -1.2e-16 is replaced by an exact zero.
double skew_tan(double p) {
  return p == 2.0 ? 0.0 : std::tan(p * kPi / 2.0);
}

}  // namespace

void StableLaw::validate() const {
  if (!(p > 1.0 && p <= 2.0)) {
    throw std::invalid_argument("stable index must lie in (1, 2]");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("stable scale must be positive");
  }
  if (!(std::abs(beta) <= 1.0)) {
    throw std::invalid_argument("stable skewness must lie in [-1, 1]");
  }
}

std::complex<double> stable_cf(const StableLaw& law, double t) {
  if (t == 0.0) return {1.0, 0.0};
  const double mag = law.scale * std::pow(std::abs(t), law.p);
  const double sgn = t > 0.0 ? 1.0 : -1.0;
  const double phase = mag * law.beta * sgn * skew_tan(law.p);
  return std::exp(std::complex<double>(-mag, phase));
}

double stable_cdf(const StableLaw& law, double x) {
  law.validate();
  // F(x) = 1/2 - (1/pi) int_0^inf Im(exp(-itx) phi(t)) / t dt, and for t > 0
  // Im(exp(-itx) phi(t)) = exp(-c t^p) sin(c beta tan(p pi/2) t^p - t x).
  const double c = law.scale;
  const double k = c * law.beta * skew_tan(law.p);
  const double p = law.p;
  const auto integrand = [&](double t) {
    if (t == 0.0) return -x;  // limit of sin(k t^p - t x) / t for p > 1
    const double tp = std::pow(t, p);
    return std::exp(-c * tp) * std::sin(k * tp - t * x) / t;
  };
  const double upper = std::pow(std::log(1e12) / c, 1.0 / p);
  // Panels about half an oscillation wide keep the local rule accurate.
  const double freq = std::abs(x) + std::abs(k) * p *
                                        std::pow(upper, p - 1.0);
  const int panels =
      std::clamp(static_cast<int>(std::ceil(upper * freq / kPi)), 64, 20000);
  const double width = upper / panels;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  double total = 0.0;
  double err = 0.0;
  const auto add = [&](double a, double b) {
    double e = 0.0;
    total += Rule::integrate(integrand, a, b, 6, 1e-9, &e);
    err += e;
  };
  // The t^(p-1) term is not smooth at 0: split the first panel dyadically.
  double inner = width;
  while (inner > 1e-12 * width) {
    add(0.5 * inner, inner);
    inner *= 0.5;
  }
  add(0.0, inner);
  for (int i = 1; i < panels; ++i) add(i * width, (i + 1) * width);
  err /= kPi;
  if (!(err <= 1e-6)) {
    throw QuadratureError("stable_cdf at x=" + std::to_string(x), err);
  }
  return std::clamp(0.5 - total / kPi, 0.0, 1.0);
}

double stable_sample(const StableLaw& law, Engine& rng) {
  // Chambers-Mallows-Stuck for index a != 1 in the (sigma, beta, 0)
  // convention, where exp(-sigma^a |t|^a (1 - i beta sgn t tan(pi a/2))) is
  // the characteristic function; hence sigma = c^{1/a}.
  const double a = law.p;
  const double v = kPi * (uniform01(rng) - 0.5);
  double u;
  do {
    u = uniform01(rng);
  } while (u == 0.0);
  const double w = -std::log(u);
  const double tb = law.beta * skew_tan(a);
  const double b = std::atan(tb) / a;
  const double s = std::pow(1.0 + tb * tb, 1.0 / (2.0 * a));
  const double z = s * std::sin(a * (v + b)) / std::pow(std::cos(v), 1.0 / a) *
                   std::pow(std::cos(v - a * (v + b)) / w, (1.0 - a) / a);
  return std::pow(law.scale, 1.0 / a) * z;
}

StableCdfTable::StableCdfTable(StableLaw law, double lo, double hi,
                               double step)
    : law_(law) {
  law_.validate();
  if (!(hi > lo && step > 0.0)) {
    throw std::invalid_argument("StableCdfTable needs lo < hi and step > 0");
  }
  // Uniform nodes on [lo, hi], then nodes whose distance from the core grows
  // by 5% per node out to 10 times the core width on each side.
  const double span = hi - lo;
  std::vector<double> left;
  for (double d = step; d < 10 * span; d = std::max(d * 1.05, d + step)) {
    left.push_back(lo - d);
  }
  nodes_.assign(left.rbegin(), left.rend());
  const auto count = static_cast<std::size_t>(std::ceil(span / step));
  for (std::size_t i = 0; i <= count; ++i) {
    nodes_.push_back(lo + step * static_cast<double>(i));
  }
  const double top = nodes_.back();
  for (double d = step; d < 10 * span; d = std::max(d * 1.05, d + step)) {
    nodes_.push_back(top + d);
  }
  values_.reserve(nodes_.size());
  for (double x : nodes_) values_.push_back(stable_cdf(law_, x));
}

double StableCdfTable::operator()(double x) const {
  if (!(x > nodes_.front() && x < nodes_.back())) return stable_tail_cdf(law_, x);
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const auto i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const double frac = (x - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
  return values_[i] + frac * (values_[i + 1] - values_[i]);
}

double stable_tail_cdf(const StableLaw& law, double x) {
  // P(Z > x) ~ C_p (1 + beta)/2 c x^-p and P(Z < -x) ~ C_p (1 - beta)/2 c x^-p
  // with C_p = (1 - p) / (Gamma(2 - p) cos(p pi / 2)); zero for p = 2.
  if (law.p == 2.0) return x > 0.0 ? 1.0 : 0.0;
  const double cp = (1.0 - law.p) /
                    (gamma_fn(2.0 - law.p) * std::cos(law.p * kPi / 2.0));
  const double mass = cp * law.scale * std::pow(std::abs(x), -law.p);
  if (x > 0.0) return std::max(0.0, 1.0 - 0.5 * (1.0 + law.beta) * mass);
  return std::min(1.0, 0.5 * (1.0 - law.beta) * mass);
}

double gamma_fn(double z) {
  if (z == std::floor(z) && z <= 0.0) {
    throw std::domain_error("Gamma has a pole at " + std::to_string(z));
  }
  if (z > 0.0) return std::tgamma(z);
  return kPi / (std::sin(kPi * z) * std::tgamma(1.0 - z));
}

StableLaw theorem_params(const ParamCurve& curve, double a_const,
                         double c_obs) {
  const double am = curve.alpha_min();
  if (!(am > 0.5 && am < 1.0)) {
    throw std::invalid_argument(
        "stable regime needs 1/2 < alpha_min < 1, got " + std::to_string(am));
  }
  if (c_obs == 0.0 || !std::isfinite(c_obs)) {
    throw std::invalid_argument("stable regime needs a nonzero drift c");
  }
  if (!(a_const > 0.0)) {
    throw std::invalid_argument("tail amplitude A must be positive");
  }
  const double p = 1.0 / am;
  StableLaw law;
  law.p = p;
  // Gamma(1 - p) < 0 and cos(p pi / 2) < 0 for p in (1, 2).
  law.scale = a_const * std::pow(std::abs(c_obs), p) * gamma_fn(1.0 - p) *
              std::cos(kPi * p / 2.0);
  law.beta = c_obs > 0.0 ? 1.0 : -1.0;
  if (!(law.scale > 0.0)) {
    throw std::logic_error("stable scale came out non-positive");
  }
  return law;
}

}  // namespace skewlab
