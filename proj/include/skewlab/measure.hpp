#pragma once

// Estimates of the invariant measure m: Birkhoff histograms of its density h,
// the slice integral of h along x = 1/2 and the tail amplitude A built on it,
// the return-time tail of phi_Y, and the Monte Carlo constant of X_n.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "skewlab/circle.hpp"
#include "skewlab/interval.hpp"
#include "skewlab/rng.hpp"

namespace skewlab {

/// Histogram over S^1 x [0,1]. omega bins are uniform; x bins are uniform on
/// [1/4, 1] (three quarters of the bins) and geometric with ratio 1.05 below
/// 1/4, the last bin reaching down to 0. Weights are exact small integers
/// when filled by counting, so merging grids is order-independent.
class DensityGrid {
 public:
  explicit DensityGrid(std::size_t n_omega = 256, std::size_t n_x = 512);

  std::size_t n_omega() const noexcept { return n_omega_; }
  std::size_t n_x() const noexcept { return x_edges_.size() - 1; }
  const std::vector<double>& x_edges() const noexcept { return x_edges_; }

  std::size_t omega_bin(double omega) const noexcept;
  std::size_t x_bin(double x) const noexcept;

  void add(double omega, double x, double weight = 1.0) noexcept {
    weights_[omega_bin(omega) * n_x() + x_bin(x)] += weight;
    total_ += weight;
  }
  /// Adds another grid of the same shape. Throws std::invalid_argument on a
  /// shape mismatch.
  void merge(const DensityGrid& other);

  double weight(std::size_t i, std::size_t j) const {
    return weights_[i * n_x() + j];
  }
  double total_weight() const noexcept { return total_; }
  /// Probability mass of bin (i, j) and the density (mass / area).
  double mass(std::size_t i, std::size_t j) const;
  double density(std::size_t i, std::size_t j) const;
  double total_mass() const;
  double x_width(std::size_t j) const { return x_edges_[j + 1] - x_edges_[j]; }

  /// m(Y) = mass of x > 1/2.
  double mass_on_y() const;
  /// Density averaged over S^1 x [lo, hi], overlapping bins prorated.
  double strip_mean(double lo, double hi) const;
  /// Weight in the strip, with the same proration.
  double strip_weight(double lo, double hi) const;
  /// Density of the x-marginal per x bin, and its CDF at x (linear in bins).
  std::vector<double> x_marginal() const;
  double x_marginal_cdf(double x) const;
  /// Mass of each omega slab times n_omega (1 for Lebesgue marginal).
  std::vector<double> omega_marginal() const;

  /// Bins with weight below `min_weight`, as flat indices i * n_x + j.
  std::vector<std::size_t> starved_bins(double min_weight) const;

  /// Merges blocks of fo x fx bins (fo | n_omega, fx | n_x).
  DensityGrid coarsen(std::size_t fo, std::size_t fx) const;

  /// Uniform weights; used to validate the functionals on a known density.
  static DensityGrid uniform(std::size_t n_omega, std::size_t n_x,
                             double weight_per_unit_area = 1e6);

 private:
  struct Empty {};
  explicit DensityGrid(Empty) {}
  std::size_t n_omega_ = 0;
  std::vector<double> x_edges_;
  std::vector<double> weights_;
  double total_ = 0.0;
};

struct DensityOptions {
  std::size_t n_orbits = 1000;
  std::uint64_t n_steps = 100000;
  std::uint64_t burn_in = 10000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::size_t n_omega = 256;
  std::size_t n_x = 512;
  /// Bins with fewer hits are reported on the warning channel.
  double starved_below = 10.0;
};

/// Birkhoff histogram of orbits from Lebesgue-random starts after burn-in.
DensityGrid estimate_density(const ParamCurve& curve,
                             const DensityOptions& opts);

struct SliceEstimate {
  double value = 0.0;
  /// |mean over [1/2, 1/2 + 2w] - mean over [1/2, 1/2 + w]|, the size of
  /// the linear correction.
  double extrapolation_error = 0.0;
  double mean_w = 0.0;
  double mean_2w = 0.0;
  double width = 0.0;
};

/// Integral over omega of h(omega, 1/2): strip means at widths w and 2w
/// combined as 2 mean_w - mean_2w. Throws std::runtime_error when either
/// strip holds fewer than `min_weight` hits.
SliceEstimate slice_estimate(const DensityGrid& grid, double w = 1.0 / 128,
                             double min_weight = 1000.0);
double slice_integral(const DensityGrid& grid, double w = 1.0 / 128);

/// alpha_min^{3/2} sqrt(pi / (2 alpha''(x0))), the common core of the
/// closed-form constants.
double closed_form_core(const ParamCurve& curve);

/// A = slice / (4 core^{1/alpha_min}).
double constant_A(const ParamCurve& curve, double slice);
/// A with the core doubled (two-sided Laplace asymptote): A / 2^{1/alpha_min}.
double constant_A_two_sided(const ParamCurve& curve, double slice);

/// C_2 = 1 / (2^{alpha_min} core)^{1/alpha_min}, the limit of
/// (n / sqrt(ln n))^{1/alpha_min} X_n as stated in closed form.
double xn_limit_constant(const ParamCurve& curve);
/// C_2 with the two-sided Laplace asymptote: C_2 / 2^{1/alpha_min}.
double xn_limit_constant_two_sided(const ParamCurve& curve);

/// Mean-field prediction of X_n: the fibre growth x (2x)^alpha replaced by
/// its omega-average x (2x)^alpha_min e^{-eps w} I_0(eps w), w = ln(1/2x),
/// and the number of steps from x to 1/2 by the corresponding integral.
/// Returns x with n(x) = n. Throws std::invalid_argument for n < 1.
double xn_mean_field(const ParamCurve& curve, double n);

struct XnConstantEstimate {
  std::size_t n = 0;
  std::size_t samples = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double c2 = 0.0;
  double c2_two_sided = 0.0;
  double ratio = 0.0;
  double ratio_two_sided = 0.0;
};

/// Mean and standard error of (n / sqrt(ln n))^{1/alpha_min} X_n(omega) over
/// independent Lebesgue omegas. Throws std::invalid_argument for n < 2.
XnConstantEstimate xn_asymptotic_constant(const ParamCurve& curve,
                                          std::size_t n, std::size_t samples,
                                          std::uint64_t seed,
                                          unsigned workers = 0);

/// Approximate m-sample: Lebesgue start (x never exactly 0) followed by
/// burn_in steps.
SkewPoint sample_invariant(const ParamCurve& curve, Engine& rng,
                           std::uint64_t burn_in = 10000);

/// Approximate m_Y-sample: sample_invariant, then forward to the first visit
/// of Y.
SkewPoint sample_invariant_in_y(const ParamCurve& curve, Engine& rng,
                                std::uint64_t burn_in = 10000);

struct TailOptions {
  std::size_t n_excursions = 1'000'000;
  /// Independent induced chains; each discards `burn_in_returns` excursions.
  std::size_t chains = 64;
  std::size_t burn_in_returns = 100;
  double n_lo = 1e2;
  double n_hi = 1e4;
  std::size_t grid_points = 41;
  /// Minimum number of excursions longer than n_hi before the range shrinks.
  std::size_t min_tail = 50;
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

struct TailFit {
  /// Survival grid, log-spaced over the fit range.
  std::vector<double> n;
  /// m(phi_Y > n) = m(Y) P_Y(phi > n), and the excursion counts behind it.
  std::vector<double> survival;
  std::vector<std::uint64_t> exceed;
  std::vector<double> residuals;
  double n_lo = 0.0, n_hi = 0.0;
  bool range_shrunk = false;
  double exponent = 0.0;
  double exponent_stderr = 0.0;
  double amplitude = 0.0;
  /// m(phi_Y > n) (n / sqrt(ln n))^{1/alpha_min} per grid point, and its
  /// weighted mean: the amplitude with the exponent pinned at 1/alpha_min.
  std::vector<double> local_amplitude;
  double amplitude_fixed = 0.0;
  /// Time-in-Y estimate N / sum phi from the same excursions.
  double m_y = 0.0;
  double mean_phi = 0.0;
  std::uint64_t excursions = 0;
  std::uint64_t longest = 0;
};

/// Excursion statistics shared by the tail fit and the Kac check.
struct ExcursionSample {
  /// All return times, chain by chain.
  std::vector<std::uint64_t> phi;
  /// phi[chain_offsets[c] .. chain_offsets[c+1]) belongs to chain c.
  std::vector<std::size_t> chain_offsets;
  std::uint64_t total_steps = 0;
};

ExcursionSample sample_excursions(const ParamCurve& curve,
                                  const TailOptions& opts);

/// Weighted least squares of ln m(phi_Y > n) on ln(sqrt(ln n) / n); weights
/// are the binomial inverse variances of the log survival.
TailFit fit_tail(const ExcursionSample& sample, const TailOptions& opts,
                 double alpha_min);
TailFit tail_fit(const ParamCurve& curve, const TailOptions& opts);

struct KacEstimate {
  double mean_phi = 0.0;
  double mean_phi_stderr = 0.0;
  /// m(Y) from the time-in-Y fraction of independent plain orbits.
  double m_y = 0.0;
  double m_y_stderr = 0.0;
  double product = 0.0;
};

/// E_Y(phi) from excursions times m(Y) from independent orbits.
KacEstimate kac_check(const ParamCurve& curve, const ExcursionSample& sample,
                      std::size_t orbits, std::uint64_t steps,
                      std::uint64_t seed, unsigned workers = 0);

/// One-step transport of the grid's mass through T: each bin emits
/// `points_per_bin` uniform points carrying equal shares of its mass. Returns
/// the L1 distance (in mass) between the transported and original grids.
double transport_l1(const ParamCurve& curve, const DensityGrid& grid,
                    std::size_t points_per_bin, std::uint64_t seed);

/// Total variation across omega of the density in the x-slab containing x,
/// relative to the slab mean.
double omega_variation(const DensityGrid& grid, double x);

}  // namespace skewlab
