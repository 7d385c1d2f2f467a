#pragma once

// Limit-theorem experiments for Birkhoff sums S_n f of the skew product:
// centring, regime classification, normalizers, ensembles of S_n f / B_n,
// distances to target laws, and checks of the induced-map reduction.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewlab/circle.hpp"
#include "skewlab/interval.hpp"

namespace skewlab {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Built-in observables: "zero", "x", "x2", "sin_omega" (sin 2 pi omega),
/// "x_sin_omega". Throws ConfigError for an unknown id.
Observable observable_by_id(const std::string& id);

struct CenteringOptions {
  std::size_t orbits = 200;
  std::uint64_t steps = 1'000'000;
  std::uint64_t burn_in = 10'000;
  std::uint64_t seed = 7;
  unsigned workers = 0;
};

/// f - coefficient * k, where k is the centring profile. With k = 1 this is
/// f minus its m-mean; a profile with k(omega, 0) = 0 removes the mean while
/// keeping f(omega, 0) unchanged.
struct CenteredObservable {
  Observable base;
  std::string profile_id = "one";
  std::function<double(double, double)> profile = [](double, double) {
    return 1.0;
  };
  double coefficient = 0.0;
  /// m-mean of base and standard error of the centred mean (orbit batches).
  double mean_raw = 0.0;
  double mean_stderr = 0.0;
  /// c = integral over omega of the centred f at x = 0, and its quadrature
  /// error.
  double c = 0.0;
  double c_error = 0.0;

  double operator()(double omega, double x) const {
    return base.f(omega, x) - coefficient * profile(omega, x);
  }
};

/// Subtracts the estimated m-mean.
CenteredObservable center(const ParamCurve& curve, const Observable& f,
                          const CenteringOptions& opts = {});
/// Subtracts (mean f / mean k) k.
CenteredObservable center_with_profile(const ParamCurve& curve,
                                       const Observable& f,
                                       const Observable& k,
                                       const CenteringOptions& opts = {});
/// Subtracts a mean known in closed form (stderr 0).
CenteredObservable center_known(const ParamCurve& curve, const Observable& f,
                                double mean);

enum class Regime { kCltSmallAlpha, kNonstandard, kStable, kCltCZero };
std::string regime_name(Regime r);

struct RegimeSpec {
  Regime regime = Regime::kCltSmallAlpha;
  double alpha_min = 0.0;
  double c = 0.0;
  double c_error = 0.0;
  bool c_is_zero = false;
  /// alpha_min = 1/2 with c treated as zero.
  bool ambiguous = false;
  std::optional<double> a_const;
  std::optional<double> sigma2;
};

/// c counts as zero when |c| <= 3 max(quadrature error, 1e-14).
RegimeSpec classify_regime(const ParamCurve& curve,
                           const CenteredObservable& f);

/// sqrt(n) in both CLT regimes, sqrt(c^2 A / 4 n ln^2 n) at alpha_min = 1/2,
/// n^alpha_min sqrt(alpha_min ln n) in the stable regime. Throws ConfigError
/// for n < 2, or when the nonstandard regime lacks A or has c = 0.
double normalizer(const RegimeSpec& spec, double n);

/// Sorted values of S_n f / B_n.
struct EmpiricalLaw {
  std::size_t n = 0;
  std::vector<double> samples;
  std::size_t count() const noexcept { return samples.size(); }
};

struct EnsembleOptions {
  std::uint64_t seed = 1;
  std::uint64_t burn_in = 10'000;
  unsigned workers = 0;
};

/// One ensemble per requested n, all read off the same orbits (orbit i is
/// run to max(ns) steps from an approximate m-sample).
std::vector<EmpiricalLaw> birkhoff_ensembles(
    const ParamCurve& curve, const CenteredObservable& f,
    const RegimeSpec& spec, const std::vector<std::size_t>& ns,
    std::size_t n_samples, const EnsembleOptions& opts = {});

EmpiricalLaw birkhoff_ensemble(const ParamCurve& curve,
                               const CenteredObservable& f,
                               const RegimeSpec& spec, std::size_t n,
                               std::size_t n_samples,
                               const EnsembleOptions& opts = {});

/// sup over sample points of |F_hat - F|. Throws std::invalid_argument for
/// fewer than 100 samples.
double ks_distance(const EmpiricalLaw& law,
                   const std::function<double(double)>& cdf);
/// Two-sample KS statistic.
double ks_two_sample(const EmpiricalLaw& a, const EmpiricalLaw& b);

/// max over t in the grid of |mean exp(itX) - cf(t)|.
double cf_distance(const EmpiricalLaw& law,
                   const std::function<std::complex<double>(double)>& cf,
                   const std::vector<double>& t_grid);
/// 0, step, ..., t_max. Throws std::invalid_argument unless
/// 0 < step <= t_max <= 10.
std::vector<double> default_t_grid(double t_max = 10.0, double step = 0.05);

double normal_cdf(double x, double variance);

struct ReductionReport {
  std::size_t n = 0;
  std::size_t induced_steps = 0;
  double m_y = 0.0;
  double ks = 0.0;
  double bound = 0.05;
  bool pass = false;
  EmpiricalLaw direct;
  EmpiricalLaw induced;
};

/// From matched m_Y-distributed starts: S_N f / B_N against
/// S^Y_K f_Y / B_N with K = floor(N m(Y)).
ReductionReport induced_reduction_check(const ParamCurve& curve,
                                        const CenteredObservable& f,
                                        const RegimeSpec& spec, std::size_t n,
                                        std::size_t n_samples, double m_y,
                                        const EnsembleOptions& opts = {},
                                        double bound = 0.05);

struct HypothesisOptions {
  std::vector<std::size_t> n_grid = {100, 200, 400, 800, 1600, 3200, 6400};
  std::vector<double> eps = {0.5, 1.0, 2.0};
  std::size_t chains = 10;
  std::size_t excursions_per_chain = 100'000;
  std::size_t burn_in_returns = 100;
  /// Growth allowed between the lower and upper halves of the n grid.
  double growth_bound = 2.0;
  /// Bound on |S^Y_N f_Y| / N at N = excursions_per_chain.
  double birkhoff_tol = 0.1;
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

struct TailCountRow {
  double eps = 0.0;
  /// n m(M >= eps B_n) per grid point.
  std::vector<double> scaled;
  double sup = 0.0;
  double growth = 0.0;
  bool bounded = false;
};

struct HypothesisReport {
  double m_y = 0.0;
  double mean_phi = 0.0;
  std::vector<std::size_t> n_grid;
  std::vector<TailCountRow> tail_counts;
  /// 95% quantile of |S^Y_n phi - n E_Y phi| / B_n per grid point.
  std::vector<double> phi_q95;
  double phi_q95_growth = 0.0;
  bool phi_tight = false;
  /// Mean over chains of S^Y_N f_Y / N, and of S^Y_N phi / N.
  double birkhoff_f = 0.0;
  double birkhoff_phi = 0.0;
  bool birkhoff_pass = false;
  bool pass = false;
};

HypothesisReport hypothesis_suite(const ParamCurve& curve,
                                  const CenteredObservable& f,
                                  const RegimeSpec& spec,
                                  const HypothesisOptions& opts = {});

struct VarianceProfile {
  std::vector<std::size_t> n;
  /// Var(S_n f) / n and bootstrap standard errors.
  std::vector<double> var_over_n;
  std::vector<double> stderr_;
  double sigma2 = 0.0;
  /// Spread of var_over_n over the top octave relative to sigma2.
  double drift = 0.0;
  bool plateau = false;
};

/// Var(S_n f)/n on a grid of n from one set of orbits. Warns when the drift
/// over the top octave exceeds `warn_drift`; `plateau` means drift <= `tol`.
VarianceProfile variance_estimate(const ParamCurve& curve,
                                  const CenteredObservable& f,
                                  const std::vector<std::size_t>& n_grid,
                                  std::size_t n_samples,
                                  const EnsembleOptions& opts = {},
                                  double tol = 0.10, double warn_drift = 0.20);

}  // namespace skewlab
