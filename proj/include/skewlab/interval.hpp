#pragma once

// Fibre maps T_alpha on [0,1] and the skew product
//   T(omega, x) = (4 omega, T_{alpha(omega)}(x)).

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

#include "skewlab/circle.hpp"

namespace skewlab {

/// x (1 + 2^a x^a) on [0, 1/2], 2x - 1 on (1/2, 1]. x = 1/2 uses the left
/// branch and maps to 1.
inline double t_alpha(double x, double alpha) noexcept {
  if (x > 0.5) return 2.0 * x - 1.0;
  if (x <= 0.0) return 0.0;
  return x * (1.0 + std::exp(alpha * std::log(2.0 * x)));
}

/// Derivative of t_alpha: 1 + (a+1)(2x)^a on [0, 1/2], 2 on (1/2, 1].
inline double t_alpha_deriv(double x, double alpha) noexcept {
  if (x > 0.5) return 2.0;
  if (x <= 0.0) return 1.0;
  return 1.0 + (alpha + 1.0) * std::exp(alpha * std::log(2.0 * x));
}

/// The unique x in [0, 1/2] with t_alpha(x) = y, for 0 < y <= 1.
/// Throws std::domain_error outside that range.
double t_alpha_left_inverse(double y, double alpha);

/// A point (omega, x) of S^1 x [0,1].
struct SkewPoint {
  OmegaState omega;
  double x = 0.0;
};

/// In-place skew step: x <- T_{alpha(omega)}(x), then omega <- 4 omega.
inline void step(SkewPoint& p, const ParamCurve& curve) noexcept {
  p.x = t_alpha(p.x, curve(p.omega.value()));
  p.omega.advance();
}

inline SkewPoint skew_step(SkewPoint p, const ParamCurve& curve) noexcept {
  step(p, curve);
  return p;
}

inline bool in_y(double x) noexcept { return x > 0.5; }

/// A real observable f(omega, x) with regularity metadata.
struct Observable {
  std::string id;
  std::function<double(double, double)> f;
  double lipschitz = 0.0;
  double holder = 1.0;

  double operator()(double omega, double x) const { return f(omega, x); }
};

/// Birkhoff accumulators over one orbit segment.
struct OrbitAccumulator {
  std::uint64_t steps = 0;
  double sum = 0.0;
  /// max over k <= steps of |S_k f|.
  double max_abs = 0.0;
  std::uint64_t time_in_y = 0;
};

/// Runs n steps from p (p is advanced in place), accumulating S_n f,
/// max_k |S_k f| and #{k < n : T^k p in Y}.
template <class F>
OrbitAccumulator run_orbit(SkewPoint& p, const ParamCurve& curve,
                           std::uint64_t n, F&& f) {
  OrbitAccumulator acc;
  for (std::uint64_t k = 0; k < n; ++k) {
    const double w = p.omega.value();
    acc.sum += f(w, p.x);
    acc.max_abs = std::max(acc.max_abs, std::abs(acc.sum));
    if (p.x > 0.5) ++acc.time_in_y;
    p.x = t_alpha(p.x, curve(w));
    p.omega.advance();
  }
  acc.steps = n;
  return acc;
}

inline OrbitAccumulator orbit(SkewPoint p, const ParamCurve& curve,
                              std::uint64_t n, const Observable& f) {
  return run_orbit(p, curve, n, f);
}

}  // namespace skewlab
