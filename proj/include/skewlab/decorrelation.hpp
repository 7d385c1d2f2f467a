#pragma once

// Statistics of base observables chi(omega) under F(omega) = 4 omega: L^p
// norms of Birkhoff sums and their maxima, and correlations
// Cov(G, H o F^N) computed exactly (trigonometric polynomials), through the
// transfer operator, or by Monte Carlo.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace skewlab {

using BaseFn = std::function<double(double)>;

/// Integral of chi over [0, 1].
double base_mean(const BaseFn& chi);

struct LpEstimate {
  std::size_t n = 0;
  double p = 2.0;
  /// ||S_n chi||_p and ||M_n chi||_p, M_n = max_{k <= n} |S_k chi|.
  double sum_norm = 0.0;
  double max_norm = 0.0;
};

/// Both norms at every n in `ns` from the same Lebesgue-random digit-stream
/// orbits. chi is centred by quadrature first. Throws std::invalid_argument
/// unless 1 <= p <= 8.
std::vector<LpEstimate> lp_birkhoff_norms(const BaseFn& chi,
                                          const std::vector<std::size_t>& ns,
                                          double p, std::size_t n_samples,
                                          std::uint64_t seed,
                                          unsigned workers = 0);

double lp_birkhoff_norm(const BaseFn& chi, std::size_t n, double p,
                        std::size_t n_samples, std::uint64_t seed,
                        unsigned workers = 0);
double max_birkhoff_norm(const BaseFn& chi, std::size_t n, double p,
                         std::size_t n_samples, std::uint64_t seed,
                         unsigned workers = 0);

struct BirkhoffProfile {
  std::vector<LpEstimate> rows;
  /// ||S_n||_p / sqrt(n) and ||M_n||_p / ((ln n)^{(p-1)/p} sqrt(n)).
  std::vector<double> sum_ratio;
  std::vector<double> max_ratio;
  /// Largest ratios seen: the empirical K_p.
  double sum_sup = 0.0;
  double max_sup = 0.0;
  bool sum_trend_ok = false;
  bool max_trend_ok = false;
};

/// Norms over n = 2^lo .. 2^hi. A trend passes when the largest ratio over
/// the top three octaves is at most `slack` times the largest over the
/// bottom three.
BirkhoffProfile dyadic_profile(const BaseFn& chi, double p, int lo, int hi,
                               std::size_t n_samples, std::uint64_t seed,
                               unsigned workers = 0, double slack = 1.2);

/// Real trigonometric polynomial sum_k c_k e^{2 pi i k omega} with
/// c_{-k} = conj(c_k).
class TrigPoly {
 public:
  TrigPoly() = default;
  static TrigPoly constant(double a);
  static TrigPoly cos_mode(long long k, double a = 1.0);
  static TrigPoly sin_mode(long long k, double a = 1.0);

  TrigPoly& operator+=(const TrigPoly& o);
  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }

  std::complex<double> coeff(long long k) const;
  long long degree() const;
  double operator()(double omega) const;
  BaseFn as_function() const;

 private:
  std::map<long long, std::complex<double>> c_;
};

/// Cov(G, H o F^N) = sum_{k != 0} G^(-4^N k) H^(k).
double correlation_exact(const TrigPoly& g, const TrigPoly& h, int n);

struct McCorrelation {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Monte Carlo over digit-stream omegas.
McCorrelation correlation_mc(const BaseFn& g, const BaseFn& h, int n,
                             std::size_t n_samples, std::uint64_t seed,
                             unsigned workers = 0);

/// Integral of (P^N G - mean G) H with (P^N G)(omega) the average of G over
/// the 4^N preimages of omega, and 64-point Gauss-Legendre in omega. Throws
/// std::invalid_argument for N outside [0, 10].
double correlation_transfer(const BaseFn& g, const BaseFn& h, int n);

struct DecayFit {
  std::vector<int> n;
  std::vector<double> cov;
  /// Fit of ln |cov| = ln C + N ln delta over points with |cov| > floor.
  double delta = 0.0;
  double c = 0.0;
  std::size_t used = 0;
};

DecayFit decay_fit(const BaseFn& g, const BaseFn& h, int n_max = 10,
                   double floor = 1e-13);

}  // namespace skewlab
