#include "skewlab/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "skewlab/rng.hpp"

namespace skewlab {
namespace {

std::vector<double> alphas_along(const OmegaState& omega, std::size_t count,
                                 const ParamCurve& curve) {
  std::vector<double> out(count);
  OmegaState w = omega;
  for (std::size_t j = 0; j < count; ++j) {
    out[j] = curve(w.value());
    w.advance();
  }
  return out;
}

double pull_back(double y, double alpha, std::size_t depth) {
  try {
    return t_alpha_left_inverse(y, alpha);
  } catch (const std::domain_error& e) {
    throw std::runtime_error("X_n pull-back failed at depth " +
                             std::to_string(depth) + ": " + e.what());
  }
}

bool returns_at(SkewPoint p, const ParamCurve& curve, std::size_t n) {
  for (std::size_t k = 1; k <= n; ++k) {
    step(p, curve);
    const bool inside = p.x > 0.5;
    if (inside != (k == n)) return false;
  }
  return true;
}

}  // namespace

XnSequence xn_sequence(const OmegaState& omega, std::size_t n,
                       const ParamCurve& curve) {
  XnSequence s;
  s.omega = omega.value();
  s.values.assign(n + 1, 0.0);
  s.values[0] = 1.0;
  if (n == 0) return s;
  s.values[1] = 0.5;
  if (n == 1) return s;
  // X_k(F^{n-k} omega) is the left preimage of X_{k-1}(F^{n-k+1} omega)
  // under T_{alpha(F^{n-k} omega)}.
  const auto alphas = alphas_along(omega, n - 1, curve);
  for (std::size_t k = 2; k <= n; ++k) {
    s.values[k] = pull_back(s.values[k - 1], alphas[n - k], k);
  }
  return s;
}

double xn_value(const OmegaState& omega, std::size_t n,
                const ParamCurve& curve) {
  if (n == 0) return 1.0;
  double x = 0.5;
  if (n == 1) return x;
  const auto alphas = alphas_along(omega, n - 1, curve);
  for (std::size_t k = 2; k <= n; ++k) x = pull_back(x, alphas[n - k], k);
  return x;
}

double yn_value(const OmegaState& omega, std::size_t n,
                const ParamCurve& curve) {
  if (n == 0) throw std::invalid_argument("Y_n needs n >= 1");
  return 0.5 * (xn_value(omega.advanced(), n - 1, curve) + 1.0);
}

GeometryConstants compute_geometry(const ParamCurve& curve,
                                   std::size_t grid) {
  GeometryConstants g;
  // Slope bound: a tangent (u, v) over x <= 1/2 maps to (4u, v') with
  // |v'| <= 3|v| + C|u|, C = sup |x ln(2x) alpha' (2x)^alpha|; any D >= C is
  // preserved. Take D = 2 max(4C, 1).
  double drift = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double w = (static_cast<double>(i) + 0.5) / grid;
    const double a = curve(w);
    const double da = std::abs(curve.derivative(w));
    for (std::size_t j = 1; j <= 512; ++j) {
      const double x = 0.5 * static_cast<double>(j) / 512.0;
      const double v = x * std::abs(std::log(2.0 * x)) * da *
                       std::pow(2.0 * x, a);
      drift = std::max(drift, v);
    }
  }
  g.vertical_drift = drift;
  g.slope_bound = 2.0 * std::max(4.0 * drift, 1.0);

  double min_i1 = std::numeric_limits<double>::infinity();
  double lam = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid; ++i) {
    const double w = static_cast<double>(i) / grid;
    const double fw = 4.0 * w - std::floor(4.0 * w);
    const double x2 = t_alpha_left_inverse(0.5, curve(w));
    min_i1 = std::min(min_i1, 0.5 - x2);
    // X_3(w) is the left preimage under T_{alpha(w)} of X_2(F w); the
    // derivative of the left branch is increasing, so its minimum over
    // [X_3, X_1] sits at X_3.
    const double x3 =
        t_alpha_left_inverse(t_alpha_left_inverse(0.5, curve(fw)), curve(w));
    lam = std::min(lam, t_alpha_deriv(x3, curve(w)));
  }
  g.min_i1 = min_i1;
  g.eps0 = std::min(1.0 / 16.0, 0.9 * min_i1 / g.slope_bound);
  g.q = 1;
  while (std::pow(4.0, -g.q) >= g.eps0) ++g.q;
  g.lambda_raw = lam;
  g.lambda = std::min(lam, 1.9);
  g.lambda_clamped = lam > 1.9;
  g.a = (1.0 - g.lambda / 4.0) / g.slope_bound;
  return g;
}

bool sample_partition_pair(const ParamCurve& curve,
                           const GeometryConstants& consts, std::size_t n,
                           std::uint64_t seed, PartitionPair& out) {
  Engine rng(seed);
  const std::size_t depth = static_cast<std::size_t>(consts.q) + n;
  std::vector<std::uint8_t> prefix(depth);
  for (auto& d : prefix) d = static_cast<std::uint8_t>(rng() >> 62);
  const std::uint64_t tail_a = rng();
  const std::uint64_t tail_b = rng();
  out.n = n;
  out.a.omega = OmegaState::from_digits(prefix, DigitSource::random(tail_a));
  out.b.omega = OmegaState::from_digits(prefix, DigitSource::random(tail_b));
  out.domega = std::ldexp(OmegaState::from_seed(tail_a).value() -
                              OmegaState::from_seed(tail_b).value(),
                          -2 * static_cast<int>(depth));
  for (SkewPoint* p : {&out.a, &out.b}) {
    const double hi = yn_value(p->omega, n, curve);
    const double lo = yn_value(p->omega, n + 1, curve);
    p->x = lo + uniform01(rng) * (hi - lo);
    if (!(p->x > lo)) p->x = hi;
    if (!returns_at(*p, curve, n)) return false;
  }
  return true;
}

ExpansionReport expansion_check(const ParamCurve& curve,
                                const GeometryConstants& consts,
                                std::size_t pairs, std::size_t max_n,
                                std::uint64_t seed) {
  ExpansionReport rep;
  rep.lambda = consts.lambda;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.min_ratio_by_n.assign(max_n + 1,
                            std::numeric_limits<double>::quiet_NaN());
  Engine pick(derive_seed(seed, 0, 1));
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(pick() % max_n);
    PartitionPair pp;
    if (!sample_partition_pair(curve, consts, n, derive_seed(seed, i, 2),
                               pp)) {
      ++rep.skipped;
      continue;
    }
    const double before = d_prime(consts, pp.a.x - pp.b.x, pp.domega);
    if (before == 0.0) {
      ++rep.skipped;
      continue;
    }
    SkewPoint a = pp.a, b = pp.b;
    for (std::size_t k = 0; k < n; ++k) {
      step(a, curve);
      step(b, curve);
    }
    const double after =
        d_prime(consts, a.x - b.x, a.omega.value() - b.omega.value());
    const double ratio = after / before;
    ++rep.pairs_tested;
    double& slot = rep.min_ratio_by_n[n];
    if (std::isnan(slot) || ratio < slot) slot = ratio;
    if (ratio < rep.min_ratio) {
      rep.min_ratio = ratio;
      rep.worst_n = n;
      rep.worst_omega_a = pp.a.omega.value();
      rep.worst_x_a = pp.a.x;
      rep.worst_omega_b = pp.b.omega.value();
      rep.worst_x_b = pp.b.x;
    }
  }
  rep.pass =
      rep.pairs_tested > 0 && rep.min_ratio >= consts.lambda * (1.0 - 1e-9);
  return rep;
}

namespace {

// sum_{k<n} ln T'_{alpha(F^k omega)}(x_k); p is advanced n steps.
double log_jacobian(SkewPoint& p, const ParamCurve& curve, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = curve(p.omega.value());
    s += std::log(t_alpha_deriv(p.x, a));
    p.x = t_alpha(p.x, a);
    p.omega.advance();
  }
  return s;
}

}  // namespace

DistortionReport distortion_check(const ParamCurve& curve,
                                  const GeometryConstants& consts,
                                  std::size_t pairs_per_n, std::size_t max_n,
                                  std::uint64_t seed) {
  DistortionReport rep;
  rep.sup_by_n.assign(max_n + 1, 0.0);
  for (std::size_t n = 1; n <= max_n; ++n) {
    for (std::size_t i = 0; i < pairs_per_n; ++i) {
      PartitionPair pp;
      if (!sample_partition_pair(curve, consts, n,
                                 derive_seed(seed, n * pairs_per_n + i, 3),
                                 pp)) {
        ++rep.skipped;
        continue;
      }
      SkewPoint a = pp.a, b = pp.b;
      const double la = log_jacobian(a, curve, n);
      const double lb = log_jacobian(b, curve, n);
      const double dist = std::abs(a.omega.value() - b.omega.value()) +
                          std::abs(a.x - b.x);
      if (dist == 0.0) {
        ++rep.skipped;
        continue;
      }
      // det DT^n = 4^n (T^n_omega)'(x); the 4^n cancels in the ratio.
      const double q = std::abs(std::expm1(la - lb)) / dist;
      rep.sup_by_n[n] = std::max(rep.sup_by_n[n], q);
      ++rep.pairs_tested;
    }
  }
  rep.sup_all = *std::max_element(rep.sup_by_n.begin(), rep.sup_by_n.end());
  // n = 1 is affine (quotient 0), so the lower half starts at n = 2.
  const std::size_t mid = (max_n + 2) / 2;
  double lower = 0.0, upper = 0.0;
  for (std::size_t n = 2; n <= max_n; ++n) {
    (n <= mid ? lower : upper) = std::max(n <= mid ? lower : upper,
                                          rep.sup_by_n[n]);
  }
  rep.growth_ratio = lower > 0.0 ? upper / lower : 0.0;
  rep.pass = std::isfinite(rep.sup_all) && rep.pairs_tested > 0 &&
             rep.growth_ratio <= rep.growth_threshold;
  return rep;
}

std::vector<double> distortion_refinement(const ParamCurve& curve,
                                          const OmegaState& omega,
                                          std::size_t n,
                                          const std::vector<double>& offsets,
                                          double u) {
  const double hi = yn_value(omega, n, curve);
  const double lo = yn_value(omega, n + 1, curve);
  const double xa = lo + u * (hi - lo);
  std::vector<double> out;
  out.reserve(offsets.size());
  for (double h : offsets) {
    SkewPoint a{omega, xa};
    SkewPoint b{omega, xa + h};
    const double la = log_jacobian(a, curve, n);
    const double lb = log_jacobian(b, curve, n);
    out.push_back(std::abs(std::expm1(la - lb)) / std::abs(a.x - b.x));
  }
  return out;
}

CheckRecord xy_consistency_check(const ParamCurve& curve, std::size_t samples,
                                 std::size_t max_n, std::uint64_t seed) {
  CheckRecord rec{"xy_consistency", samples, 0.0, 1e-9, true};
  Engine rng(derive_seed(seed, 0, 4));
  std::size_t failures = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % max_n);
    const auto omega = OmegaState::from_seed(derive_seed(seed, i, 5));
    const double y_next = yn_value(omega, n + 1, curve);
    const double y_n = yn_value(omega, n, curve);
    // Y_{n+1} lands on the boundary point 1/2 after n steps.
    SkewPoint p{omega, y_next};
    for (std::size_t k = 1; k <= n; ++k) {
      step(p, curve);
      if (k < n && !(p.x < 0.5)) ++failures;
    }
    rec.worst = std::max(rec.worst, std::abs(p.x - 0.5));
    // Interior points of (Y_{n+1}, Y_n] return at exactly n.
    SkewPoint mid{omega, 0.5 * (y_next + y_n)};
    if (!returns_at(mid, curve, n)) ++failures;
  }
  rec.pass = failures == 0 && rec.worst <= rec.threshold;
  return rec;
}

CheckRecord partition_label_check(const ParamCurve& curve,
                                  const GeometryConstants& consts,
                                  std::size_t samples, std::uint64_t seed) {
  CheckRecord rec{"partition_label", samples, 0.0, 0.0, true};
  Engine rng(derive_seed(seed, 0, 6));
  const ReturnOptions opts{consts.q, 100'000'000};
  const auto zero = [](double, double) { return 0.0; };
  std::size_t failures = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    SkewPoint p{OmegaState::from_seed(derive_seed(seed, i, 7)),
                0.5 + 0.5 * (1.0 - uniform01(rng))};
    const auto r = next_return(p, curve, zero, opts);
    bool ok = r.label_n == r.phi && p.x > 0.5;
    if (r.label_depth == consts.q + static_cast<int>(r.phi)) {
      const std::uint64_t block_mask = (std::uint64_t{1} << (2 * consts.q)) - 1;
      const std::uint64_t landed = p.omega.window() >> (64 - 2 * consts.q);
      ok = ok && (r.label_s & block_mask) == landed;
    }
    if (!ok) ++failures;
  }
  rec.worst = static_cast<double>(failures);
  rec.pass = failures == 0;
  return rec;
}

CheckRecord admissible_curve_check(const ParamCurve& curve,
                                   const GeometryConstants& consts,
                                   std::size_t segments, std::uint64_t seed) {
  CheckRecord rec{"admissible_curve", segments, 0.0, 1.0, true};
  Engine rng(derive_seed(seed, 0, 8));
  const double d = consts.slope_bound;
  constexpr int kProbes = 64;
  for (std::size_t i = 0; i < segments; ++i) {
    const bool left = (rng() & 1U) != 0;
    const double slope = d * (2.0 * uniform01(rng) - 1.0);
    double len = 0.01 + 0.23 * uniform01(rng);
    // Keep the whole segment inside one branch strip of height 1/2.
    if (std::abs(slope) * len > 0.49) len = 0.49 / std::abs(slope);
    const double rise = slope * len;
    const double lo = left ? 0.0 : 0.5 + 1e-9;
    const double hi = left ? 0.5 : 1.0;
    const double start_lo = lo + std::max(0.0, -rise);
    const double start_hi = hi - std::max(0.0, rise);
    const double x_start = start_lo + uniform01(rng) * (start_hi - start_lo);
    const double w_start = uniform01(rng);
    const auto image_x = [&](double t) {
      const double w = w_start + t;
      const double x = std::clamp(x_start + slope * t, lo, hi);
      return t_alpha(x, curve(w - std::floor(w)));
    };
    for (int j = 1; j < kProbes; ++j) {
      const double t = len * j / kProbes;
      const double h = 1e-7 * len;
      const double dx = image_x(t + h) - image_x(t - h);
      const double image_slope = dx / (4.0 * 2.0 * h);
      rec.worst = std::max(rec.worst, std::abs(image_slope) / d);
    }
  }
  rec.pass = rec.worst <= rec.threshold;
  return rec;
}

CheckRecord comparison_bound_check(const ParamCurve& curve,
                                   std::size_t grid) {
  CheckRecord rec{"comparison_bound", grid * grid, 0.0, 0.0, true};
  const double amin = curve.alpha_min();
  const double amax = curve.alpha_max();
  for (std::size_t i = 0; i < grid; ++i) {
    const double w = static_cast<double>(i) / grid;
    for (std::size_t j = 1; j <= grid; ++j) {
      const double x = 0.5 * static_cast<double>(j) / grid;
      const double upper = x * (1.0 + std::pow(2.0, amax) * std::pow(x, amin));
      rec.worst = std::max(rec.worst, t_alpha(x, curve(w)) - upper);
    }
  }
  rec.pass = rec.worst <= 1e-15;
  return rec;
}

CheckRecord xn_sandwich_check(const ParamCurve& curve, std::size_t n,
                              std::size_t orbits, std::uint64_t seed) {
  CheckRecord rec{"xn_sandwich", orbits, 0.0, 0.0, true};
  const double pmin = 1.0 / curve.alpha_min();
  const double pmax = 1.0 / curve.alpha_max();
  bool decreasing = true;
  double c = 0.0;
  for (std::size_t i = 0; i < orbits; ++i) {
    const auto s =
        xn_sequence(OmegaState::from_seed(derive_seed(seed, i, 9)), n, curve);
    for (std::size_t k = 1; k <= n; ++k) {
      if (!(s.values[k] < s.values[k - 1])) decreasing = false;
      const double kk = static_cast<double>(k);
      c = std::max(c, 1.0 / (s.values[k] * std::pow(kk, pmin)));
      c = std::max(c, s.values[k] * std::pow(kk, pmax));
    }
  }
  rec.worst = c;
  rec.threshold = std::numeric_limits<double>::infinity();
  rec.pass = decreasing && std::isfinite(c);
  return rec;
}

}  // namespace skewlab
