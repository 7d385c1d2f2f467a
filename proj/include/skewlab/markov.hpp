#pragma once

// Markov structure of the skew product: the pull-back sequences X_n, Y_n,
// first returns to Y = S^1 x (1/2, 1], the induced map, and numerical checks
// of its expansion and distortion on the partition sets A_{s,n}.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewlab/circle.hpp"
#include "skewlab/interval.hpp"

namespace skewlab {

/// Pull-back chain of 1/2 along a base orbit. values[k] = X_k(F^{n-k} omega)
/// for k = 0..n, so values[0] = 1, values[1] = 1/2 and values[n] = X_n(omega).
/// Each values[k] is distributed like X_k under Lebesgue omega.
struct XnSequence {
  double omega = 0.0;
  std::vector<double> values;

  std::size_t length() const noexcept {
    return values.empty() ? 0 : values.size() - 1;
  }
  double back() const { return values.back(); }
};

XnSequence xn_sequence(const OmegaState& omega, std::size_t n,
                       const ParamCurve& curve);

/// X_n(omega) alone, without keeping the chain.
double xn_value(const OmegaState& omega, std::size_t n,
                const ParamCurve& curve);

/// Y_n(omega) = (X_{n-1}(F omega) + 1) / 2, n >= 1. Points of
/// (Y_{n+1}(omega), Y_n(omega)] return to Y in exactly n steps.
double yn_value(const OmegaState& omega, std::size_t n,
                const ParamCurve& curve);

/// One excursion from Y.
struct ReturnRecord {
  double entry_omega = 0.0;
  double entry_x = 0.0;
  std::uint64_t phi = 0;
  /// Induced sum f_Y = sum_{k < phi} f(T^k y).
  double f_sum = 0.0;
  /// M = max_{1 <= k <= phi} |S_k f|.
  double max_abs = 0.0;
  /// Partition label: label_n == phi and label_s holds the leading
  /// label_depth = min(q + phi, 32) base-4 digits of the entry omega.
  std::uint64_t label_n = 0;
  std::uint64_t label_s = 0;
  int label_depth = 0;
};

class ReturnTimeTruncated : public std::runtime_error {
 public:
  explicit ReturnTimeTruncated(ReturnRecord partial)
      : std::runtime_error("return time exceeded cap of " +
                           std::to_string(partial.phi) + " steps"),
        partial_(partial) {}
  const ReturnRecord& partial() const noexcept { return partial_; }

 private:
  ReturnRecord partial_;
};

struct ReturnOptions {
  int q = 3;
  std::uint64_t cap = 100'000'000;
};

/// First return from p (p.x > 1/2) back to Y. On success p holds T_Y(p).
/// Throws std::invalid_argument if p is not in Y, ReturnTimeTruncated when
/// the cap is hit (p is then left at the truncation point).
template <class F>
ReturnRecord next_return(SkewPoint& p, const ParamCurve& curve, F&& f,
                         const ReturnOptions& opts = {}) {
  if (!(p.x > 0.5)) {
    throw std::invalid_argument("return_time needs a point of Y (x > 1/2)");
  }
  ReturnRecord r;
  r.entry_omega = p.omega.value();
  r.entry_x = p.x;
  const std::uint64_t entry_window = p.omega.window();
  double sum = 0.0;
  double best = 0.0;
  std::uint64_t k = 0;
  do {
    const double w = p.omega.value();
    sum += f(w, p.x);
    best = std::max(best, std::abs(sum));
    p.x = t_alpha(p.x, curve(w));
    p.omega.advance();
    ++k;
    if (k >= opts.cap && !(p.x > 0.5)) {
      r.phi = k;
      r.f_sum = sum;
      r.max_abs = best;
      throw ReturnTimeTruncated(r);
    }
  } while (!(p.x > 0.5));
  r.phi = k;
  r.f_sum = sum;
  r.max_abs = best;
  r.label_n = k;
  const std::uint64_t depth = std::min<std::uint64_t>(opts.q + k, 32);
  r.label_depth = static_cast<int>(depth);
  r.label_s = depth == 32 ? entry_window : entry_window >> (64 - 2 * depth);
  return r;
}

inline ReturnRecord return_time(SkewPoint p, const ParamCurve& curve,
                                const Observable& f,
                                const ReturnOptions& opts = {}) {
  return next_return(p, curve, f, opts);
}

/// N consecutive excursions starting at p (in Y); p ends at T_Y^N(p).
template <class F>
std::vector<ReturnRecord> run_induced(SkewPoint& p, const ParamCurve& curve,
                                      std::size_t count, F&& f,
                                      const ReturnOptions& opts = {}) {
  std::vector<ReturnRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(next_return(p, curve, f, opts));
  }
  return out;
}

inline std::vector<ReturnRecord> induced_orbit(SkewPoint p,
                                               const ParamCurve& curve,
                                               std::size_t count,
                                               const Observable& f,
                                               const ReturnOptions& opts = {}) {
  return run_induced(p, curve, count, f, opts);
}

/// Constants of the Markov construction, computed on an omega grid.
struct GeometryConstants {
  /// Slope bound of admissible curves.
  double slope_bound = 0.0;
  /// Horizontal scale eps_0 and partition depth q with 4^-q < eps_0.
  double eps0 = 0.0;
  int q = 0;
  /// Expansion factor in (1, 2), and the unclamped infimum it came from.
  double lambda = 0.0;
  double lambda_raw = 0.0;
  bool lambda_clamped = false;
  /// Weight of the vertical term in d' = a |dx| + |d omega|.
  double a = 0.0;
  /// inf over omega of |I_1(omega)| = 1/2 - X_2(omega).
  double min_i1 = 0.0;
  /// sup |x ln(2x) alpha'(omega) (2x)^alpha(omega)| over the grid.
  double vertical_drift = 0.0;
};

GeometryConstants compute_geometry(const ParamCurve& curve,
                                   std::size_t grid = 4096);

/// Weighted distance d' between two points given coordinate differences.
inline double d_prime(const GeometryConstants& g, double dx,
                      double domega) noexcept {
  return g.a * std::abs(dx) + std::abs(domega);
}

/// Pair of points in a common partition set A_{s,n}: both omegas share the
/// first q + n digits, and each x lies in J_n of its own omega.
struct PartitionPair {
  std::size_t n = 0;
  SkewPoint a;
  SkewPoint b;
  double domega = 0.0;
};

struct ExpansionReport {
  std::size_t pairs_tested = 0;
  std::size_t skipped = 0;
  double lambda = 0.0;
  double min_ratio = 0.0;
  std::size_t worst_n = 0;
  double worst_omega_a = 0.0, worst_x_a = 0.0;
  double worst_omega_b = 0.0, worst_x_b = 0.0;
  /// min ratio per n (index n, entry 0 unused; NaN where no pair).
  std::vector<double> min_ratio_by_n;
  bool pass = false;
};

/// Samples pairs in common A_{s,n} with n uniform in [1, max_n] and checks
/// d'(T^n a, T^n b) >= lambda d'(a, b).
ExpansionReport expansion_check(const ParamCurve& curve,
                                const GeometryConstants& consts,
                                std::size_t pairs, std::size_t max_n,
                                std::uint64_t seed);

struct DistortionReport {
  std::size_t pairs_tested = 0;
  std::size_t skipped = 0;
  /// sup over pairs of |det ratio - 1| / d(T^n a, T^n b), per n.
  std::vector<double> sup_by_n;
  double sup_all = 0.0;
  /// max over the upper half of the n range / max over the lower half.
  double growth_ratio = 0.0;
  double growth_threshold = 2.0;
  bool pass = false;
};

DistortionReport distortion_check(const ParamCurve& curve,
                                  const GeometryConstants& consts,
                                  std::size_t pairs_per_n, std::size_t max_n,
                                  std::uint64_t seed);

/// |det ratio - 1| / d for a pair at same omega, x_b = x_a + h, over a
/// decreasing sequence of h. Used to show the quotient has a finite limit.
std::vector<double> distortion_refinement(const ParamCurve& curve,
                                          const OmegaState& omega,
                                          std::size_t n,
                                          const std::vector<double>& offsets,
                                          double u = 0.5);

/// Draws one partition pair; nullopt-like failure is reported by returning
/// false when the sampled points do not both return at time n.
bool sample_partition_pair(const ParamCurve& curve,
                           const GeometryConstants& consts, std::size_t n,
                           std::uint64_t seed, PartitionPair& out);

/// Result of a property check, emitted as one JSON record.
struct CheckRecord {
  std::string name;
  std::size_t samples = 0;
  double worst = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Forward-maps Y_{n+1}(omega) and checks it stays in [0, 1/2) for steps
/// 1..n-1 and reaches 1/2 at step n; also that interior points of
/// (Y_{n+1}, Y_n] return at exactly n.
CheckRecord xy_consistency_check(const ParamCurve& curve, std::size_t samples,
                                 std::size_t max_n, std::uint64_t seed);

/// Every sampled entry point receives one label (s, n) with n = phi and
/// T^n lands in the block of s mod 4^q.
CheckRecord partition_label_check(const ParamCurve& curve,
                                  const GeometryConstants& consts,
                                  std::size_t samples, std::uint64_t seed);

/// Images of random line segments of slope <= D over |K| < 1/4 inside
/// K x [0,1/2] or K x (1/2,1] again have slope <= D.
CheckRecord admissible_curve_check(const ParamCurve& curve,
                                   const GeometryConstants& consts,
                                   std::size_t segments, std::uint64_t seed);

/// x (1 + 2^alpha_max x^alpha_min) >= T_{alpha(omega)}(x) on a grid.
CheckRecord comparison_bound_check(const ParamCurve& curve,
                                   std::size_t grid = 512);

/// X_n strictly decreasing along chains and the sandwich
/// 1/(C n^{1/alpha_min}) <= X_n <= C / n^{1/alpha_max}; worst = smallest C.
CheckRecord xn_sandwich_check(const ParamCurve& curve, std::size_t n,
                              std::size_t orbits, std::uint64_t seed);

}  // namespace skewlab
