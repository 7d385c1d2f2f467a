#include "skewlab/decorrelation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "skewlab/circle.hpp"
#include "skewlab/parallel.hpp"
#include "skewlab/quadrature.hpp"
#include "skewlab/rng.hpp"

namespace skewlab {

namespace {

constexpr std::uint64_t kLpStream = 0x6c706e6d;
constexpr std::uint64_t kCorrStream = 0x636f7272;

double max_over(const std::vector<double>& v, std::size_t b, std::size_t e) {
  return *std::max_element(v.begin() + static_cast<std::ptrdiff_t>(b),
                           v.begin() + static_cast<std::ptrdiff_t>(e));
}

}  // namespace

double base_mean(const BaseFn& chi) {
  return integrate(chi, 0.0, 1.0, 1e-13).value;
}

std::vector<LpEstimate> lp_birkhoff_norms(const BaseFn& chi,
                                          const std::vector<std::size_t>& ns,
                                          double p, std::size_t n_samples,
                                          std::uint64_t seed,
                                          unsigned workers) {
  if (!(p >= 1.0 && p <= 8.0)) throw std::invalid_argument("p must be in [1, 8]");
  if (ns.empty() || n_samples == 0) {
    throw std::invalid_argument("need at least one n and one sample");
  }
  std::vector<std::size_t> sorted = ns;
  std::sort(sorted.begin(), sorted.end());
  const double mean = base_mean(chi);
  std::vector<std::vector<double>> s_abs(sorted.size(),
                                         std::vector<double>(n_samples));
  std::vector<std::vector<double>> m_abs = s_abs;
  parallel_for(n_samples, workers, [&](std::size_t i) {
    OmegaState w = OmegaState::from_seed(derive_seed(seed, i, kLpStream));
    double s = 0.0, best = 0.0;
    std::size_t k = 0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      for (; k < sorted[j]; ++k) {
        s += chi(w.value()) - mean;
        best = std::max(best, std::abs(s));
        w.advance();
      }
      s_abs[j][i] = std::abs(s);
      m_abs[j][i] = best;
    }
  });
  const auto norm = [&](const std::vector<double>& v) {
    double acc = 0.0;
    for (double a : v) acc += std::pow(a, p);
    return std::pow(acc / static_cast<double>(v.size()), 1.0 / p);
  };
  std::vector<LpEstimate> out;
  for (std::size_t n : ns) {
    const auto j = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), n) - sorted.begin());
    out.push_back({n, p, norm(s_abs[j]), norm(m_abs[j])});
  }
  return out;
}

double lp_birkhoff_norm(const BaseFn& chi, std::size_t n, double p,
                        std::size_t n_samples, std::uint64_t seed,
                        unsigned workers) {
  return lp_birkhoff_norms(chi, {n}, p, n_samples, seed, workers)
      .front()
      .sum_norm;
}

double max_birkhoff_norm(const BaseFn& chi, std::size_t n, double p,
                         std::size_t n_samples, std::uint64_t seed,
                         unsigned workers) {
  return lp_birkhoff_norms(chi, {n}, p, n_samples, seed, workers)
      .front()
      .max_norm;
}

BirkhoffProfile dyadic_profile(const BaseFn& chi, double p, int lo, int hi,
                               std::size_t n_samples, std::uint64_t seed,
                               unsigned workers, double slack) {
  if (lo < 1 || hi - lo < 5 || hi > 40) {
    throw std::invalid_argument("need 1 <= lo and at least six octaves");
  }
  std::vector<std::size_t> ns;
  for (int e = lo; e <= hi; ++e) ns.push_back(std::size_t{1} << e);
  BirkhoffProfile prof;
  prof.rows = lp_birkhoff_norms(chi, ns, p, n_samples, seed, workers);
  for (const auto& r : prof.rows) {
    const double n = static_cast<double>(r.n);
    prof.sum_ratio.push_back(r.sum_norm / std::sqrt(n));
    prof.max_ratio.push_back(r.max_norm /
                             (std::pow(std::log(n), (p - 1.0) / p) * std::sqrt(n)));
  }
  const std::size_t m = ns.size();
  prof.sum_sup = max_over(prof.sum_ratio, 0, m);
  prof.max_sup = max_over(prof.max_ratio, 0, m);
  prof.sum_trend_ok = max_over(prof.sum_ratio, m - 3, m) <=
                      slack * max_over(prof.sum_ratio, 0, 3);
  prof.max_trend_ok = max_over(prof.max_ratio, m - 3, m) <=
                      slack * max_over(prof.max_ratio, 0, 3);
  return prof;
}

TrigPoly TrigPoly::constant(double a) {
  TrigPoly t;
  t.c_[0] = a;
  return t;
}

TrigPoly TrigPoly::cos_mode(long long k, double a) {
  if (k == 0) return constant(a);
  TrigPoly t;
  t.c_[k] = a / 2.0;
  t.c_[-k] = a / 2.0;
  return t;
}

TrigPoly TrigPoly::sin_mode(long long k, double a) {
  TrigPoly t;
  if (k == 0) return t;
  t.c_[k] = std::complex<double>(0.0, -a / 2.0);
  t.c_[-k] = std::complex<double>(0.0, a / 2.0);
  return t;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& o) {
  for (const auto& [k, v] : o.c_) c_[k] += v;
  return *this;
}

std::complex<double> TrigPoly::coeff(long long k) const {
  const auto it = c_.find(k);
  return it == c_.end() ? std::complex<double>{} : it->second;
}

long long TrigPoly::degree() const {
  long long d = 0;
  for (const auto& [k, v] : c_) {
    if (v != std::complex<double>{}) d = std::max(d, k < 0 ? -k : k);
  }
  return d;
}

double TrigPoly::operator()(double omega) const {
  std::complex<double> s;
  for (const auto& [k, v] : c_) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) * omega;
    s += v * std::complex<double>(std::cos(a), std::sin(a));
  }
  return s.real();
}

BaseFn TrigPoly::as_function() const {
  return [t = *this](double w) { return t(w); };
}

double correlation_exact(const TrigPoly& g, const TrigPoly& h, int n) {
  if (n < 0) throw std::invalid_argument("N must be >= 0");
  const long long deg = g.degree();
  if (n >= 31) return 0.0;
  const long long scale = 1LL << (2 * n);
  std::complex<double> s;
  for (long long k = -h.degree(); k <= h.degree(); ++k) {
    if (k == 0) continue;
    const std::complex<double> hk = h.coeff(k);
    if (hk == std::complex<double>{}) continue;
    // |4^N k| > deg(G) gives a zero coefficient.
    if (scale > deg / (k < 0 ? -k : k)) continue;
    s += g.coeff(-scale * k) * hk;
  }
  return s.real();
}

McCorrelation correlation_mc(const BaseFn& g, const BaseFn& h, int n,
                             std::size_t n_samples, std::uint64_t seed,
                             unsigned workers) {
  if (n < 0 || n_samples < 2) {
    throw std::invalid_argument("need N >= 0 and at least two samples");
  }
  std::vector<double> gv(n_samples), hv(n_samples);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    OmegaState w = OmegaState::from_seed(derive_seed(seed, i, kCorrStream));
    gv[i] = g(w.value());
    for (int k = 0; k < n; ++k) w.advance();
    hv[i] = h(w.value());
  });
  const double m = static_cast<double>(n_samples);
  double mg = 0.0, mh = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    mg += gv[i];
    mh += hv[i];
  }
  mg /= m;
  mh /= m;
  std::vector<double> prod(n_samples);
  double mp = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    prod[i] = (gv[i] - mg) * (hv[i] - mh);
    mp += prod[i];
  }
  mp /= m;
  double ss = 0.0;
  for (double v : prod) ss += (v - mp) * (v - mp);
  return {mp * m / (m - 1.0), std::sqrt(ss / (m - 1.0) / m)};
}

double correlation_transfer(const BaseFn& g, const BaseFn& h, int n) {
  if (n < 0 || n > 10) throw std::invalid_argument("N must be in [0, 10]");
  const double mg = base_mean(g);
  const std::size_t m = std::size_t{1} << (2 * n);
  const double inv = 1.0 / static_cast<double>(m);
  const auto pn_g = [&](double w) {
    // Kahan summation: the deviation from the mean is O(4^-N).
    double s = 0.0, comp = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double y = (g((w + static_cast<double>(j)) * inv) - mg) - comp;
      const double t = s + y;
      comp = (t - s) - y;
      s = t;
    }
    return s * inv;
  };
  return boost::math::quadrature::gauss<double, 64>::integrate(
      [&](double w) { return pn_g(w) * h(w); }, 0.0, 1.0);
}

DecayFit decay_fit(const BaseFn& g, const BaseFn& h, int n_max, double floor) {
  if (n_max < 2 || n_max > 10) throw std::invalid_argument("n_max in [2, 10]");
  DecayFit fit;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double c = correlation_transfer(g, h, n);
    fit.n.push_back(n);
    fit.cov.push_back(c);
    if (std::abs(c) <= floor) continue;
    const double y = std::log(std::abs(c));
    sx += n;
    sy += y;
    sxx += static_cast<double>(n) * n;
    sxy += n * y;
    ++fit.used;
  }
  if (fit.used < 2) return fit;
  const double k = static_cast<double>(fit.used);
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  fit.delta = std::exp(slope);
  fit.c = std::exp((sy - slope * sx) / k);
  return fit;
}

}  // namespace skewlab
